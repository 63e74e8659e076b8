#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pellsum/expsum.hpp"
#include "pellsum/factor.hpp"

namespace pellsum::amplify {

// Smallest l >= 1 with 1 <= beta*(8l+6); for beta < 1/6 this is the unique
// l that also satisfies beta*(8l-2) < 1, for beta >= 1/6 no l satisfies the
// left inequality and the result clamps to 1.
std::uint32_t choose_ell(double beta_i);

// True iff beta*(8l-2) < 1 <= beta*(8l+6).
bool ell_window_holds(double beta_i, std::uint32_t ell);

struct AmplificationPlan {
    std::uint64_t q = 2;
    double rho = 0.5;                 // N = q^rho
    double beta = 0.05;
    std::uint32_t r = 1;
    std::vector<double> beta_i;       // M_i = q^{beta_i} / 2
    std::vector<std::uint32_t> ell_i;
};

// Derives ell_i from beta_i; enforces beta_i >= rho*beta.
AmplificationPlan make_plan(std::uint64_t q, double rho, double beta,
                            std::span<const double> beta_i);

struct Lemma2Instance {
    std::uint32_t ell = 1;
    std::vector<std::vector<std::uint32_t>> prime_sets;  // slot i and i+ell share set i
    std::uint64_t solutions = 0;   // ordered 2l-tuples with equal half sums of 1/x^2
    std::uint64_t matched = 0;     // those whose halves agree as multisets
};

// Exact rational enumeration of 1/x_1^2 + ... + 1/x_l^2 = 1/x_{l+1}^2 + ...
// over tuples with x_i, x_{i+l} drawn from prime_sets[i].
Lemma2Instance lemma2_enumerate(std::uint32_t ell,
                                std::span<const std::vector<std::uint32_t>> prime_sets,
                                std::uint64_t budget = expsum::kDefaultBudget);

struct HolderIntervalReport {
    expsum::IntervalU64 interval;
    std::uint64_t prime_count = 0;
    std::uint32_t ell = 0;
    std::uint64_t l1 = 0;
    std::uint64_t l2_squared = 0;
    std::uint64_t linf = 0;
    bool l2_mass_ok = false;       // l2^2 < (4l)^{2l} * prime_count^{2l}
    bool linf_ok = false;          // linf < q^{-1/8} * l1
    double window_margin = 0.0;    // beta_i * (8 l_i - 2)
    bool count_proxy_ok = false;   // prime_count^{2l} > q^{1/8}
};

struct HolderReport {
    double abs_S = 0.0;
    std::uint64_t s_terms = 0;
    double log_lhs = 0.0;          // 2^r l_1...l_r * log|S|  (-inf when S = 0)
    double log_rhs = 0.0;          // log of the amplified right-hand side
    bool holder_ok = false;        // log_lhs <= log_rhs
    double sum_z_real = 0.0;       // density-weighted sum over residue tuples
    double sum_z_imag = 0.0;
    std::vector<HolderIntervalReport> intervals;
};

// Amplifies |S| through the 2l_i-th moments: computes S over the prime
// intervals, each mu_i density, the density-weighted character sum over
// residue tuples, and checks the resulting moment inequality plus the
// per-interval mass bounds.
HolderReport holder_amplification_check(const AmplificationPlan& plan,
                                        std::int64_t a,
                                        std::span<const expsum::IntervalU64> intervals,
                                        std::uint64_t budget = expsum::kDefaultBudget);

struct CancellationSample {
    std::uint64_t a = 0;
    double ratio = 0.0;            // |restricted sum| / N
};

struct CancellationReport {
    std::uint64_t q = 0;
    double rho = 0.0;
    std::uint64_t N = 0;
    double beta = 0.0;
    std::uint32_t r = 0;
    std::uint64_t seed = 0;
    double exceptional_density = 0.0;
    std::vector<CancellationSample> samples;
    double max_ratio = 0.0;
    double median_ratio = 0.0;
};

// Measures |sum over x <= N, x not in E, (x,q)=1 of e_q(a xbar^2)| / N for
// seeded random a coprime to q. The exceptional set depends only on
// (N, beta, r) and is reused across samples.
CancellationReport proposition_cancellation(std::uint64_t q, double rho, double beta,
                                            std::uint32_t r, std::uint32_t sample_count,
                                            std::uint64_t seed = 0x5EED5EED5EEDULL);

} // namespace pellsum::amplify
