#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pellsum/pell.hpp"

using namespace pellsum;
using pell::fundamental_solution;

TEST_CASE("fundamental solutions match the brute-force oracle examples") {
    auto s2 = fundamental_solution(2);
    CHECK(s2.t == 3);
    CHECK(s2.u == 2);
    auto s13 = fundamental_solution(13);
    CHECK(s13.t == 649);
    CHECK(s13.u == 180);
}

TEST_CASE("square and out-of-range discriminants are rejected") {
    CHECK_THROWS_AS(fundamental_solution(4), SquareInputError);
    CHECK_THROWS_AS(fundamental_solution(9), SquareInputError);
    CHECK_THROWS_AS(fundamental_solution(1), RangeError);
    CHECK_THROWS_AS(fundamental_solution(0), RangeError);
}

TEST_CASE("brute-force agreement for moderate discriminants") {
    constexpr std::uint64_t kScanBound = 2'000'000;
    for (std::uint64_t D = 2; D <= 200; ++D) {
        std::uint64_t r = 0;
        if (is_square_u64(D, &r)) continue;
        auto sol = fundamental_solution(D);
        CHECK(sol.t * sol.t - mpz_class(D) * sol.u * sol.u == 1);
        if (sol.u <= kScanBound) {
            auto brute = oracles::brute_pell(D, sol.u.get_ui());
            REQUIRE(brute.has_value());
            CHECK(mpz_class(brute->first) == sol.t);
            CHECK(mpz_class(brute->second) == sol.u);
        } else {
            CHECK_FALSE(oracles::brute_pell(D, kScanBound).has_value());
            CHECK(oracles::pell_minimality_certificate(D, sol.t, sol.u));
        }
    }
}

TEST_CASE("eps_log and the unit lower bound eps > 2 sqrt(D)") {
    for (std::uint64_t D : {2ULL, 3ULL, 13ULL, 61ULL, 109ULL, 421ULL}) {
        auto sol = fundamental_solution(D);
        double expected = pell::log_eps(sol.t, sol.u, D);
        CHECK(std::fabs(sol.eps_log - expected) <= 1e-12 * std::max(1.0, std::fabs(expected)));
        CHECK(sol.eps_log > std::log(2.0 * std::sqrt(static_cast<double>(D))));
    }
}

TEST_CASE("group law: the squared solution solves the equation") {
    for (std::uint64_t D = 2; D <= 120; ++D) {
        std::uint64_t r = 0;
        if (is_square_u64(D, &r)) continue;
        auto sol = fundamental_solution(D);
        mpz_class t2 = 2 * sol.t * sol.t - 1;
        mpz_class u2 = 2 * sol.t * sol.u;
        CHECK(t2 * t2 - mpz_class(D) * u2 * u2 == 1);
    }
}

TEST_CASE("count_solutions small example and identities") {
    auto c = pell::count_solutions(10, 0.5);
    CHECK(c.count_fundamental == 1); // only D = 8: eps = 3 + sqrt(8) <= 8
    CHECK(c.count_all_powers == 1);

    SUBCASE("alpha <= 1/2 forces equality of the two counts") {
        for (double alpha : {0.1, 0.3, 0.5}) {
            auto v = pell::count_solutions(1000, alpha);
            CHECK(v.count_all_powers == v.count_fundamental);
        }
    }
    SUBCASE("monotone in alpha and in x") {
        auto a = pell::count_solutions(10'000, 0.5);
        auto b = pell::count_solutions(10'000, 0.6);
        CHECK(b.count_fundamental >= a.count_fundamental);
        auto d = pell::count_solutions(20'000, 0.5);
        CHECK(d.count_fundamental >= a.count_fundamental);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(pell::count_solutions(1, 0.5), RangeError);
        CHECK_THROWS_AS(pell::count_solutions(10, 0.0), RangeError);
        CHECK_THROWS_AS(pell::count_solutions(10, -1.0), RangeError);
    }
}

TEST_CASE("count_solutions against an exhaustive log-free oracle") {
    // direct check at x = 300, alpha = 1: the bound is D^(3/2), so
    // eps^n <= D^(3/2) iff eps^(2n) <= D^3, an integer-only comparison
    const double alpha = 1.0;
    std::uint64_t expect_f = 0, expect_all = 0;
    for (std::uint64_t D = 2; D <= 300; ++D) {
        std::uint64_t r = 0;
        if (is_square_u64(D, &r)) continue;
        auto sol = fundamental_solution(D);
        mpz_class bound;
        mpz_ui_pow_ui(bound.get_mpz_t(), D, 3);
        unsigned n = 0;
        for (;;) {
            mpz_class tk, uk;
            oracles::quad_pow(sol.t, sol.u, D, 2 * (n + 1), tk, uk);
            if (oracles::cmp_quad(tk, uk, bound, 0, D) <= 0) ++n;
            else break;
        }
        if (n >= 1) {
            ++expect_f;
            expect_all += n;
        }
    }
    auto c = pell::count_solutions(300, alpha);
    CHECK(c.count_fundamental == expect_f);
    CHECK(c.count_all_powers == expect_all);
    CHECK(c.count_all_powers > c.count_fundamental); // e.g. D = 24: eps = 5 + sqrt(24)
}

TEST_CASE("power identity report") {
    SUBCASE("both residuals vanish for alpha <= 1/2") {
        for (double alpha : {0.2, 0.5}) {
            auto rep = pell::check_power_identity(1000, alpha);
            CHECK(rep.S == rep.S_fundamental);
            CHECK(rep.residual_half == 0);
            CHECK(rep.residual_quarter == 0);
        }
    }
    SUBCASE("alpha = 1: the quarter shift closes, the half shift does not") {
        auto rep = pell::check_power_identity(1000, 1.0);
        CHECK(rep.S == 420);
        CHECK(rep.S_fundamental == 377);
        CHECK(rep.S_shift_half == 0);
        CHECK(rep.residual_quarter == 0);
        CHECK(rep.residual_half == 43);
    }
    SUBCASE("boundary alpha = 3/2 accepted") {
        auto rep = pell::check_power_identity(10, 1.5);
        CHECK(rep.x == 10);
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(pell::check_power_identity(10, -0.1), RangeError);
        CHECK_THROWS_AS(pell::check_power_identity(10, 1.6), RangeError);
    }
}

TEST_CASE("exact power comparison resolves the guard band") {
    // D = 24: eps = 5 + sqrt(24), eps^2 = 49 + 10 sqrt(24). The exponent
    // s* with 24^(s*) = eps^2 separates the two answers; +-1e-12 around it
    // lands inside the log-space guard band and must be settled exactly.
    auto sol = fundamental_solution(24);
    double eps2 = 49.0 + 10.0 * std::sqrt(24.0);
    double s_star = std::log(eps2) / std::log(24.0);
    CHECK(pell::eps_power_leq_D_pow(sol, 2, s_star + 1e-12));
    CHECK_FALSE(pell::eps_power_leq_D_pow(sol, 2, s_star - 1e-12));
    CHECK(pell::count_powers_below(sol, s_star + 1e-12) == 2);
    CHECK(pell::count_powers_below(sol, s_star - 1e-12) == 1);
}

TEST_CASE("bounded expansion agrees with the full one") {
    for (std::uint64_t D = 2; D <= 300; ++D) {
        std::uint64_t r = 0;
        if (is_square_u64(D, &r)) continue;
        auto full = fundamental_solution(D);
        auto bounded = pell::fundamental_solution_bounded(D, full.eps_log + 0.1);
        REQUIRE(bounded.has_value());
        CHECK(bounded->t == full.t);
        // a bound below eps must abort
        CHECK_FALSE(pell::fundamental_solution_bounded(D, full.eps_log - 5.0).has_value());
    }
}
