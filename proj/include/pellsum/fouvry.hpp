#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pellsum/expsum.hpp"
#include "pellsum/factor.hpp"

namespace pellsum::fouvry {

// Hooley's conjectured constant B(alpha) (piecewise), the two published
// lower-bound coefficients, and the main-term factor 4 alpha^2 / pi^2.
// The two lower-bound coefficients agree at alpha = 1/2 and disagree for
// larger alpha; both are evaluated verbatim and the gap is reported.
struct HooleyCoefficients {
    double alpha = 0.0;
    double B_alpha = 0.0;
    double fouvry_lower_06 = 0.0;      // (1 + (2a-1)(3-2a)) / pi^2
    double fouvry_lower_319 = 0.0;     // (1 + (a-1/2)(11/2-3a)) / pi^2
    double main_factor = 0.0;          // 4 a^2 / pi^2
    std::string delta_exponent_claim;  // asymptotic deficit exponent, descriptive
};

HooleyCoefficients coefficient_table(double alpha);

enum class ResidueMode { Auto, Scan, Crt };

// R(u): all residues W in [0, u^2) with W^2 = 1 (mod u^2). Scan mode walks
// the full range; CRT mode composes the square roots of 1 modulo each
// prime-power factor of u^2.
std::vector<std::uint64_t> sqrt_one_residues(std::uint64_t u,
                                             ResidueMode mode = ResidueMode::Auto,
                                             std::uint64_t budget = expsum::kDefaultBudget);

// Phi(u1, u2) = -u1bar^2 u1^2 + u2bar^2 u2^2 mod (u1 u2)^2, with u1bar the
// inverse of u1 mod u2^2 and u2bar the inverse of u2 mod u1^2.
// Satisfies Phi = 1 (mod u1^2), Phi = -1 (mod u2^2), Phi^2 = 1 (mod (u1 u2)^2).
std::uint64_t phi_pair(std::uint64_t u1, std::uint64_t u2);

struct RangeParameters {
    double X_alpha = 0.0;       // (x^alpha - x^(-1-alpha)) / 2
    double Y2 = 0.0;            // 2^(1/(2 alpha)) * u^(1 + 1/(2 alpha))
    double Y3 = 0.0;            // u * sqrt(x)
    bool y2_approximate = true; // Y2 is an asymptotic shape, compare with bands
};

RangeParameters range_parameters(std::uint64_t x, double alpha, std::uint64_t u);

// 8 sqrt(x) * sum over the admissible region { u1 <= x^(1/4),
// sqrt(x)/u1 <= u2 <= min(x^alpha / u1, sqrt(x) u1) } with u1 u2 odd and
// coprime, of 1/(u1 u2). Raw lattice sum, no correction term.
double admissible_main_term(std::uint64_t x, double alpha,
                            std::uint64_t budget = expsum::kDefaultBudget);

struct ExcludedDeficitReport {
    std::uint64_t x = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::uint32_t r = 0;
    double u1_harmonic = 0.0;            // sum of 1/u1 over x^(1/4) < u1 < x^(alpha/2)
    double exceptional_harmonic = 0.0;   // sum over the dyadic grid of sum_{u2 in E(U2)} 1/u2
    std::vector<std::uint64_t> u2_grid;  // powers of two in the excluded window
    double deficit = 0.0;                // sqrt(x) * u1_harmonic * exceptional_harmonic
    double fitted_C = 0.0;               // exponent matching the reference shape
    double ratio_at_fit = 0.0;           // deficit / reference(fitted_C)
};

// Mass removed from the main term by dropping exceptional u2; compared
// against the shape (alpha-1/2)^2 beta (log 1/beta)^C sqrt(x) (log x)^2.
ExcludedDeficitReport excluded_deficit(std::uint64_t x, double alpha, double beta,
                                       std::uint32_t r,
                                       std::uint64_t budget = expsum::kDefaultBudget);

struct TrilinearProbeRow {
    std::uint64_t h = 0;
    std::uint64_t u1 = 0;
    std::uint64_t gcd_h_u1sq = 0;
    std::uint64_t admissible_count = 0;  // u2 in range, not excluded, coprime to u1
    double abs_inner = 0.0;
    double ratio = 0.0;                  // abs_inner / admissible_count (0 if empty)
    double gcd_shape = 0.0;              // gcd(h, u1^2) / admissible_count
};

struct TrilinearProbeReport {
    expsum::IntervalU64 u1_range;
    expsum::IntervalU64 u2_range;
    double beta = 0.0;
    std::uint32_t r = 0;
    std::uint64_t excluded_count = 0;    // exceptional u2 within the range
    std::vector<TrilinearProbeRow> rows;
};

// Empirical scatter of restricted inner sums against the gcd-sensitive
// shape; the exceptional set is rebuilt from (max u2, beta, r).
TrilinearProbeReport restricted_bound_probe(expsum::IntervalU64 u1_range,
                                            expsum::IntervalU64 u2_range,
                                            double beta, std::uint32_t r,
                                            std::uint64_t h_max,
                                            std::uint64_t budget = expsum::kDefaultBudget);

} // namespace pellsum::fouvry
