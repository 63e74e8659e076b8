#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pellsum/fouvry.hpp"

using namespace pellsum;
using namespace pellsum::fouvry;

namespace {
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
}

TEST_CASE("coefficient table values") {
    auto c = coefficient_table(0.5);
    CHECK(c.B_alpha == doctest::Approx(1.0 / kPi2).epsilon(1e-14));
    CHECK(c.fouvry_lower_06 == doctest::Approx(1.0 / kPi2).epsilon(1e-14));
    CHECK(c.fouvry_lower_319 == doctest::Approx(1.0 / kPi2).epsilon(1e-14));

    auto c1 = coefficient_table(1.0);
    CHECK(c1.B_alpha == doctest::Approx(3.0 / kPi2).epsilon(1e-14));

    auto c52 = coefficient_table(2.5);
    CHECK(c52.B_alpha == doctest::Approx(9.0 / kPi2 + 1.0 / (8.0 * kPi2)).epsilon(1e-14));

    CHECK_THROWS_AS(coefficient_table(0.0), RangeError);
    CHECK_THROWS_AS(coefficient_table(-1.0), RangeError);
}

TEST_CASE("branch continuity at the joints") {
    for (double joint : {1.0, 2.5}) {
        double below = coefficient_table(joint - 1e-13).B_alpha;
        double above = coefficient_table(joint + 1e-13).B_alpha;
        CHECK(std::fabs(above - below) < 1e-12);
    }
}

TEST_CASE("published lower-bound coefficients disagree away from 1/2") {
    auto c = coefficient_table(1.0);
    CHECK(c.fouvry_lower_06 == doctest::Approx(2.0 / kPi2).epsilon(1e-14));
    CHECK(c.fouvry_lower_319 == doctest::Approx(2.25 / kPi2).epsilon(1e-14));
    CHECK(c.fouvry_lower_319 - c.fouvry_lower_06 == doctest::Approx(0.25 / kPi2).epsilon(1e-12));
}

TEST_CASE("square roots of unity") {
    CHECK(sqrt_one_residues(1) == std::vector<std::uint64_t>{0});
    CHECK(sqrt_one_residues(3) == std::vector<std::uint64_t>{1, 8});
    CHECK(sqrt_one_residues(12).size() == 8);

    SUBCASE("scan equals crt for u <= 100, sizes match brute force") {
        for (std::uint64_t u = 2; u <= 100; ++u) {
            auto scan = sqrt_one_residues(u, ResidueMode::Scan);
            auto crt = sqrt_one_residues(u, ResidueMode::Crt);
            CHECK(scan == crt);
            for (std::uint64_t w : scan) CHECK(mulmod_u64(w, w, u * u) == 1);
        }
    }
    SUBCASE("scan budget trips") {
        CHECK_THROWS_AS(sqrt_one_residues(100000, ResidueMode::Scan, 1000), BudgetExceededError);
    }
}

TEST_CASE("phi pair") {
    CHECK(phi_pair(2, 3) == 17);
    CHECK(phi_pair(3, 2) == 19);
    CHECK(phi_pair(2, 5) == 49);
    CHECK_THROWS_AS(phi_pair(1, 5), RangeError);
    CHECK_THROWS_AS(phi_pair(5, 1), RangeError);
    CHECK_THROWS_AS(phi_pair(6, 9), NotCoprimeError);

    SUBCASE("contracts over all coprime pairs up to 60") {
        for (std::uint64_t u1 = 2; u1 <= 60; ++u1) {
            for (std::uint64_t u2 = 2; u2 <= 60; ++u2) {
                if (std::gcd(u1, u2) != 1) continue;
                std::uint64_t phi = phi_pair(u1, u2);
                std::uint64_t m = (u1 * u2) * (u1 * u2);
                CHECK(phi % (u1 * u1) == 1);
                CHECK((phi + 1) % (u2 * u2) == 0);
                CHECK(mulmod_u64(phi, phi, m) == 1);
                // membership in the root set of the product
                auto roots = sqrt_one_residues(u1 * u2, ResidueMode::Crt);
                CHECK(std::find(roots.begin(), roots.end(), phi) != roots.end());
            }
        }
    }
}

TEST_CASE("range parameters") {
    auto rp = range_parameters(100, 0.5, 1);
    CHECK(rp.X_alpha == doctest::Approx(4.9995).epsilon(1e-12));
    CHECK(rp.Y2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rp.Y3 == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(rp.y2_approximate);

    SUBCASE("Y3 is linear in u") {
        for (std::uint64_t u : {2ULL, 5ULL, 9ULL}) {
            auto a = range_parameters(1000, 0.7, u);
            auto b = range_parameters(1000, 0.7, 2 * u);
            CHECK(b.Y3 == doctest::Approx(2.0 * a.Y3).epsilon(1e-12));
        }
    }
    SUBCASE("X_alpha approaches x^alpha / 2") {
        for (std::uint64_t x : {100ULL, 10000ULL}) {
            for (double alpha : {0.5, 0.8}) {
                auto r = range_parameters(x, alpha, 1);
                double lead = 0.5 * std::pow(static_cast<double>(x), alpha);
                CHECK(std::fabs(r.X_alpha - lead) / lead < 1e-3);
            }
        }
    }
}

TEST_CASE("admissible region main term") {
    CHECK(admissible_main_term(16, 0.5) == 0.0);

    SUBCASE("monotone in alpha") {
        double prev = 0.0;
        for (double alpha : {0.5, 0.6, 0.7, 0.8}) {
            double v = admissible_main_term(100000, alpha);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
    SUBCASE("regression: x=1e6, alpha=0.6") {
        CHECK(admissible_main_term(1000000, 0.6) ==
              doctest::Approx(5893.9433826620898).epsilon(1e-9));
    }
    SUBCASE("direct recount on a small instance") {
        // x = 4096: u1 <= 8, lattice small enough to recount by hand here
        const std::uint64_t x = 4096;
        const double alpha = 0.8;
        double expect = 0.0;
        for (std::uint64_t u1 = 1; u1 <= 8; ++u1) {
            for (std::uint64_t u2 = 1; u2 <= 100000; ++u2) {
                if ((u1 * u2) % 2 == 0 || std::gcd(u1, u2) != 1) continue;
                double lhs = static_cast<double>(u1 * u2);
                if (lhs * lhs < static_cast<double>(x)) continue;
                double cap = std::min(std::pow(4096.0, alpha) / u1, 64.0 * u1);
                if (static_cast<double>(u2) > cap) continue;
                expect += 1.0 / (static_cast<double>(u1) * static_cast<double>(u2));
            }
        }
        expect *= 8.0 * 64.0;
        CHECK(admissible_main_term(x, alpha) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("excluded deficit") {
    SUBCASE("alpha = 1/2 has an empty outer range") {
        auto rep = excluded_deficit(1000000, 0.5, 0.05, 3);
        CHECK(rep.deficit == 0.0);
        CHECK(rep.u1_harmonic == 0.0);
    }
    SUBCASE("monotone in beta") {
        double prev = -1.0;
        for (double beta : {0.02, 0.05, 0.10, 0.20}) {
            auto rep = excluded_deficit(1000000, 0.55, beta, 3);
            CHECK(rep.deficit >= prev);
            prev = rep.deficit;
        }
    }
    SUBCASE("regression instance x=1e6, alpha=0.55, beta=0.05, r=3") {
        auto rep = excluded_deficit(1000000, 0.55, 0.05, 3);
        CHECK(rep.u2_grid == std::vector<std::uint64_t>{32});
        CHECK(rep.deficit == doctest::Approx(1402.1317525130908).epsilon(1e-9));
        CHECK(rep.fitted_C == doctest::Approx(3.75));
        CHECK(rep.ratio_at_fit > 0.0);
    }
}

TEST_CASE("restricted bound probe") {
    SUBCASE("h a multiple of u1^2 gives no cancellation") {
        auto rep = restricted_bound_probe({3, 3}, {10, 30}, 0.05, 2, 9);
        REQUIRE(!rep.rows.empty());
        for (const auto& row : rep.rows) {
            CHECK(row.ratio <= 1.0 + 1e-12);
            if (row.h % 9 == 0) CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("scatter rows carry the gcd shape") {
        auto rep = restricted_bound_probe({30, 60}, {60, 120}, 0.05, 2, 10);
        CHECK(rep.rows.size() == 31 * 10);
        CHECK(rep.excluded_count > 0);
        for (const auto& row : rep.rows) {
            CHECK(row.gcd_h_u1sq == std::gcd(row.h, row.u1 * row.u1));
            if (row.admissible_count > 0)
                CHECK(row.abs_inner <= static_cast<double>(row.admissible_count) + 1e-9);
        }
    }
}
