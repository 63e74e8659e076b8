#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "pellsum/expsum.hpp"

using namespace pellsum;
using namespace pellsum::expsum;

namespace {

// direct reference evaluation with plain summation
std::complex<double> direct_inverse_square_sum(std::uint64_t q, std::int64_t a, std::uint64_t N) {
    std::complex<double> s = 0;
    std::uint64_t ar = ((a % static_cast<std::int64_t>(q)) + static_cast<std::int64_t>(q)) % q;
    for (std::uint64_t x = 1; x <= N; ++x) {
        if (std::gcd(x, q) != 1) continue;
        std::uint64_t inv = mod_inverse(static_cast<std::int64_t>(x), q);
        std::uint64_t k = mulmod_u64(ar, mulmod_u64(inv, inv, q), q);
        double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q);
        s += std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return s;
}

} // namespace

TEST_CASE("mod_inverse basics") {
    CHECK(mod_inverse(2, 9) == 5);
    for (std::uint64_t m : {2ULL, 5ULL, 97ULL, 1000003ULL}) CHECK(mod_inverse(1, m) == 1);
    CHECK_THROWS_AS(mod_inverse(3, 6), NotCoprimeError);
    CHECK_THROWS_AS(mod_inverse(5, 0), RangeError);
    CHECK(mod_inverse(-1, 7) == 6);
    CHECK(mod_inverse(10, 7) == 5); // 3 * 5 = 15 = 1 mod 7
    // spot check the defining property
    for (std::int64_t x = 1; x < 60; ++x) {
        if (std::gcd(x, std::int64_t(61)) != 1) continue;
        CHECK(mulmod_u64(mod_inverse(x, 61), static_cast<std::uint64_t>(x), 61) == 1);
    }
}

TEST_CASE("incomplete sums: worked examples") {
    KloostermanQuery q5{5, 1, 4, nullptr};
    auto v = incomplete_kloosterman_sq(q5);
    CHECK(v.real_part == doctest::Approx(4.0 * std::cos(2.0 * std::numbers::pi / 5.0)).epsilon(1e-12));
    CHECK(std::fabs(v.imag_part) < 1e-12);
    CHECK(v.term_count == 4);

    KloostermanQuery q7{7, 1, 6, nullptr};
    auto w = incomplete_kloosterman_sq(q7);
    CHECK(w.real_part == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(w.imag_part == doctest::Approx(std::sqrt(7.0)).epsilon(1e-12));

    KloostermanQuery empty{101, 1, 0, nullptr};
    auto e = incomplete_kloosterman_sq(empty);
    CHECK(e.term_count == 0);
    CHECK(e.real_part == 0.0);
    CHECK(e.cancellation_ratio == 0.0);
}

TEST_CASE("incomplete sums: exclusions, invariants, rejections") {
    IntSet excl{1, 2};
    KloostermanQuery q{11, 3, 10, &excl};
    auto v = incomplete_kloosterman_sq(q);
    CHECK(v.term_count == 8);
    CHECK(v.abs() <= static_cast<double>(v.term_count) + 1e-12);
    CHECK(v.cancellation_ratio >= 0.0);
    CHECK(v.cancellation_ratio <= 1.0);

    CHECK_THROWS_AS(incomplete_kloosterman_sq({10, 5, 3, nullptr}), NotCoprimeError);
    CHECK_THROWS_AS(incomplete_kloosterman_sq({10, 3, 11, nullptr}), RangeError); // N > q
}

TEST_CASE("complete square character sums equal Gauss sums") {
    auto g7 = complete_square_character_sum(7, 1);
    CHECK(g7.real_part == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(g7.imag_part == doctest::Approx(std::sqrt(7.0)).epsilon(1e-12));
    auto g5 = complete_square_character_sum(5, 1);
    CHECK(g5.real_part == doctest::Approx(-1.0 + std::sqrt(5.0)).epsilon(1e-12));
    CHECK(std::fabs(g5.imag_part) < 1e-12);
    auto g3 = complete_square_character_sum(3, 1);
    CHECK(g3.real_part == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(g3.imag_part == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(complete_square_character_sum(6, 1), NotPrimeError);
    CHECK_THROWS_AS(complete_square_character_sum(7, 14), NotCoprimeError);
}

TEST_CASE("bijection: the inverse-square sum equals the direct square sum") {
    for (std::uint64_t q : {3ULL, 5ULL, 13ULL, 101ULL, 499ULL}) {
        for (std::int64_t a = 1; a <= 5 && a < static_cast<std::int64_t>(q); ++a) {
            auto lhs = complete_square_character_sum(q, a);
            // sum over y of e_q(a y^2), y = 1..q-1
            std::complex<double> rhs = 0;
            for (std::uint64_t y = 1; y < q; ++y) {
                std::uint64_t k = mulmod_u64(static_cast<std::uint64_t>(a), mulmod_u64(y, y, q), q);
                rhs += unit_phase(k, q);
            }
            CHECK(std::abs(lhs.value() - rhs) < 1e-9);
        }
    }
}

TEST_CASE("phase covariance: a and a*c^2 give equal complete sums") {
    for (std::uint64_t q : {11ULL, 37ULL, 101ULL}) {
        for (std::uint64_t c = 2; c <= 5; ++c) {
            std::uint64_t a2 = mulmod_u64(mulmod_u64(c, c, q), 3 % q, q);
            auto lhs = complete_square_character_sum(q, 3);
            auto rhs = complete_square_character_sum(q, static_cast<std::int64_t>(a2));
            CHECK(std::abs(lhs.value() - rhs.value()) < 1e-9);
        }
    }
}

TEST_CASE("N = q equals the complete sum over units") {
    for (std::uint64_t q : {5ULL, 7ULL, 23ULL}) {
        KloostermanQuery full{q, 2, q, nullptr};
        auto a = incomplete_kloosterman_sq(full);
        auto b = complete_square_character_sum(q, 2);
        CHECK(std::abs(a.value() - b.value()) < 1e-12);
        CHECK(a.term_count == q - 1);
    }
}

TEST_CASE("multilinear sums") {
    SUBCASE("degenerate r = 1 equals the incomplete sum") {
        IntervalU64 iv{1, 12};
        auto a = multilinear_sq_sum(std::vector{iv}, 13, 1, false);
        auto b = incomplete_kloosterman_sq({13, 1, 12, nullptr});
        CHECK(std::abs(a.value() - b.value()) < 1e-12);
    }
    SUBCASE("primes {2,3} mod 35") {
        IntervalU64 iv{2, 3};
        auto v = multilinear_sq_sum(std::vector{iv}, 35, 1, true);
        auto expect = unit_phase(9, 35) + unit_phase(4, 35); // 18^2 and 12^2 mod 35
        CHECK(std::abs(v.value() - expect) < 1e-12);
        CHECK(v.term_count == 2);
    }
    SUBCASE("singleton intervals multiply out to the product inverse") {
        std::vector<IntervalU64> ivs{{3, 3}, {5, 5}, {11, 11}};
        auto v = multilinear_sq_sum(ivs, 97, 2, true);
        std::uint64_t prod = (3 * 5 * 11) % 97;
        std::uint64_t inv = mod_inverse(static_cast<std::int64_t>(prod), 97);
        auto expect = unit_phase(mulmod_u64(2, mulmod_u64(inv, inv, 97), 97), 97);
        CHECK(std::abs(v.value() - expect) < 1e-12);
    }
    SUBCASE("triangle inequality and cofactor handling") {
        std::vector<IntervalU64> ivs{{2, 13}, {2, 13}};
        auto v = multilinear_sq_sum(ivs, 101, 7, true, 10);
        CHECK(v.abs() <= static_cast<double>(v.term_count) + 1e-12);
        CHECK(v.term_count == 36); // six primes per slot
        CHECK_THROWS_AS(multilinear_sq_sum(ivs, 101, 7, true, 202), NotCoprimeError);
    }
    SUBCASE("budget guard") {
        std::vector<IntervalU64> ivs{{1, 1000}, {1, 1000}, {1, 1000}};
        CHECK_THROWS_AS(multilinear_sq_sum(ivs, 1000003, 1, false, std::nullopt, 1000),
                        BudgetExceededError);
    }
}

TEST_CASE("mu density") {
    SUBCASE("worked example: primes {2,3}, ell = 1, mod 35") {
        auto dm = mu_density({2, 3}, 1, 35);
        REQUIRE(dm.counts.size() == 3);
        CHECK(dm.counts.at(0) == 2);
        CHECK(dm.counts.at(5) == 1);
        CHECK(dm.counts.at(30) == 1);
        CHECK(dm.l1 == 4);
        CHECK(dm.l2_squared == 6);
        CHECK(dm.linf == 2);
    }
    SUBCASE("total mass is prime_count^(2 ell)") {
        auto dm = mu_density({2, 30}, 2, 1009);
        std::uint64_t expect = 1;
        for (int i = 0; i < 4; ++i) expect *= dm.prime_count;
        CHECK(dm.l1 == expect);
        CHECK(dm.linf <= dm.l1);
        CHECK(static_cast<double>(dm.linf) <= std::sqrt(static_cast<double>(dm.l2_squared)) + 1e-9);
        CHECK(dm.l2_squared <= dm.l1 * dm.l1);
    }
    SUBCASE("modulus 1 puts all mass at zero") {
        auto dm = mu_density({2, 7}, 1, 1);
        REQUIRE(dm.counts.size() == 1);
        CHECK(dm.counts.at(0) == dm.l1);
    }
    SUBCASE("asymmetric split shifts the support") {
        auto plus = mu_density({2, 3}, 1, 35, SignsSplit{2, 0});
        CHECK(plus.l1 == 4);
        // 9+9, 9+4, 4+9, 4+4 => 18, 13, 13, 8
        CHECK(plus.counts.at(18) == 1);
        CHECK(plus.counts.at(13) == 2);
        CHECK(plus.counts.at(8) == 1);
    }
    SUBCASE("guards") {
        CHECK_THROWS_AS(mu_density({14, 16}, 1, 7), RangeError); // no admissible primes
        CHECK_THROWS_AS(mu_density({2, 1000}, 3, 1000003, std::nullopt, 1000), BudgetExceededError);
        CHECK_THROWS_AS(mu_density({2, 3}, 1, 35, SignsSplit{2, 1}), RangeError);
    }
}

TEST_CASE("subprogression mass") {
    auto dm = mu_density({2, 3}, 1, 35);
    SUBCASE("q1 = modulus gives linf/l1") {
        CHECK(subprogression_mass(dm, 35) ==
              doctest::Approx(static_cast<double>(dm.linf) / static_cast<double>(dm.l1)));
    }
    SUBCASE("q1 = 1 carries all mass") { CHECK(subprogression_mass(dm, 1) == 1.0); }
    SUBCASE("worked example: residues 0,5,30 all lie over 0 mod 5") {
        CHECK(subprogression_mass(dm, 5) == 1.0);
    }
    SUBCASE("non-divisor rejected") {
        CHECK_THROWS_AS(subprogression_mass(dm, 4), NotDivisorError);
    }
    SUBCASE("report carries the anti-concentration threshold") {
        auto rep = subprogression_report(dm, 35);
        CHECK(rep.max_fiber_ratio == doctest::Approx(0.5));
        CHECK(rep.threshold == doctest::Approx(std::pow(35.0, -0.125)));
        CHECK(rep.below_threshold == (rep.max_fiber_ratio < rep.threshold));
        // wider interval with a genuine spread: the mass does fall below
        auto wide = mu_density({2, 60}, 1, 101);
        auto rep2 = subprogression_report(wide, 101);
        CHECK(rep2.below_threshold);
    }
}

TEST_CASE("trilinear restricted sums") {
    SUBCASE("single u1 reduces to one incomplete sum with q = u1^2") {
        TrilinearParams p;
        p.H = 1;
        p.u1_range = {3, 3};
        p.u2_range = {1, 8};
        auto val = trilinear_restricted_sum(p);
        auto ref = incomplete_kloosterman_sq({9, 1, 8, nullptr});
        CHECK(val == doctest::Approx(ref.abs()).epsilon(1e-12));
    }
    SUBCASE("excluding the whole inner range kills the sum") {
        IntSet all;
        for (std::uint64_t u2 = 1; u2 <= 8; ++u2) all.insert(u2);
        TrilinearParams p;
        p.H = 2;
        p.u1_range = {3, 5};
        p.u2_range = {1, 8};
        p.excluded = &all;
        CHECK(trilinear_restricted_sum(p) == 0.0);
    }
    SUBCASE("triangle bound per (h, u1) term") {
        TrilinearParams p;
        p.H = 3;
        p.u1_range = {3, 7};
        p.u2_range = {1, 20};
        p.require_odd_u2 = true;
        double v = trilinear_restricted_sum(p);
        // each inner sum has at most 10 admissible u2, 5 u1 values, 3 h values
        CHECK(v <= 3.0 * 5.0 * 10.0 + 1e-9);
    }
    SUBCASE("signed mode respects coefficient weights") {
        TrilinearParams p;
        p.H = 1;
        p.u1_range = {3, 3};
        p.u2_range = {1, 8};
        p.absolute_inner = false;
        std::vector<double> ch{0.5};
        p.coeffs_h = ch;
        double v = trilinear_restricted_sum(p);
        auto ref = incomplete_kloosterman_sq({9, 1, 8, nullptr});
        CHECK(v == doctest::Approx(0.5 * ref.abs()).epsilon(1e-12));
    }
    SUBCASE("rejections") {
        TrilinearParams p;
        p.H = 1;
        p.u1_range = {4, 4};
        p.u2_range = {1, 8};
        p.require_odd_u1 = true; // no admissible u1 left
        CHECK_THROWS_AS(trilinear_restricted_sum(p), RangeError);
        TrilinearParams bad;
        bad.H = 2;
        bad.u1_range = {3, 3};
        bad.u2_range = {1, 8};
        std::vector<double> big{1.5, 0.2};
        bad.coeffs_h = big;
        CHECK_THROWS_AS(trilinear_restricted_sum(bad), RangeError);
    }
}

TEST_CASE("reference cross-check against plain summation") {
    for (std::uint64_t q : {97ULL, 994009ULL}) {
        auto fast = incomplete_kloosterman_sq({q, 5, std::min<std::uint64_t>(q, 500), nullptr});
        auto ref = direct_inverse_square_sum(q, 5, std::min<std::uint64_t>(q, 500));
        CHECK(std::abs(fast.value() - ref) < 1e-9);
    }
}
