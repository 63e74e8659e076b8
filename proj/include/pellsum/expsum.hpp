#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "pellsum/errors.hpp"
#include "pellsum/numeric.hpp"

namespace pellsum::expsum {

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

// Canonical inverse of x mod m in [0, m). NotCoprimeError if gcd(x, m) > 1.
std::uint64_t mod_inverse(std::int64_t x, std::uint64_t m);

struct SumValue {
    double real_part = 0.0;
    double imag_part = 0.0;
    std::uint64_t term_count = 0;
    double cancellation_ratio = 0.0;   // |sum| / term_count, 0 for the empty sum

    double abs() const { return std::hypot(real_part, imag_part); }
    std::complex<double> value() const { return {real_part, imag_part}; }
};

using IntSet = std::unordered_set<std::uint64_t>;

// One incomplete sum over 1 <= x <= N of e_q(a * xbar^2), x coprime to q
// and outside the excluded set. N <= q is required (longer ranges would
// just add full periods).
struct KloostermanQuery {
    std::uint64_t q = 1;
    std::int64_t a = 1;
    std::uint64_t N = 0;
    const IntSet* excluded = nullptr;
};

// Non-coprime x are skipped, never an error; term_count reports survivors.
SumValue incomplete_kloosterman_sq(const KloostermanQuery& query);

// Full sum over units: sum_{x=1}^{q-1} e_q(a * xbar^2) for prime q.
// Since inversion permutes the units this equals the quadratic Gauss sum
// minus its y=0 term, so |sum + 1| = sqrt(q).
SumValue complete_square_character_sum(std::uint64_t q, std::int64_t a);

struct IntervalU64 {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;   // inclusive
};

// sum over tuples (x_1,...,x_r), one per interval (primes only when
// restrict_to_primes, always coprime to q), of
//   e_q(a * x_1bar^2 ... x_rbar^2 * cbar^2)
// with c the optional fixed cofactor.
SumValue multilinear_sq_sum(std::span<const IntervalU64> intervals,
                            std::uint64_t q,
                            std::int64_t a,
                            bool restrict_to_primes,
                            std::optional<std::uint64_t> fixed_cofactor = std::nullopt,
                            std::uint64_t budget = kDefaultBudget);

// Distribution of xbar_1^2 + ... + xbar_plus^2 - xbar_{plus+1}^2 - ... over
// ordered tuples of primes from the interval (coprime to the modulus).
struct DensityMap {
    std::uint64_t modulus = 1;
    std::uint32_t ell = 1;             // tuples have length plus_count + minus_count = 2*ell
    std::uint32_t plus_count = 1;
    std::uint32_t minus_count = 1;
    IntervalU64 interval;
    std::uint64_t prime_count = 0;     // primes in the interval coprime to the modulus
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t l1 = 0;              // = prime_count^(2*ell)
    std::uint64_t l2_squared = 0;      // sum of squared counts
    std::uint64_t linf = 0;            // max count
};

struct SignsSplit {
    std::uint32_t plus = 0;
    std::uint32_t minus = 0;
};

// split defaults to (ell, ell); plus + minus must equal 2*ell.
DensityMap mu_density(IntervalU64 interval,
                      std::uint32_t ell,
                      std::uint64_t modulus,
                      std::optional<SignsSplit> split = std::nullopt,
                      std::uint64_t budget = kDefaultBudget);

// max over residues xi mod q1 of the mu-mass of the fiber z = xi (mod q1),
// normalized by the l1 mass. q1 must divide the density modulus.
double subprogression_mass(const DensityMap& density, std::uint64_t q1);

struct SubprogressionReport {
    std::uint64_t q1 = 1;
    double max_fiber_ratio = 1.0;
    double threshold = 1.0;       // q1^(-1/8)
    bool below_threshold = false;
};

SubprogressionReport subprogression_report(const DensityMap& density, std::uint64_t q1);

struct TrilinearParams {
    std::uint64_t H = 1;                       // h runs over 1..H
    IntervalU64 u1_range;
    IntervalU64 u2_range;
    const IntSet* excluded = nullptr;          // excluded u2 values
    std::span<const double> coeffs_h;          // empty = all ones, else size H
    std::span<const double> coeffs_u1;         // empty = all ones, else one per u1 in range
    bool require_odd_u1 = false;
    bool require_odd_u2 = false;
    bool absolute_inner = true;                // sum of |inner sums| vs signed triple sum
    std::uint64_t budget = kDefaultBudget;
};

// Inner sums are sum over admissible u2 of e(h * u2bar^2 / u1^2), with the
// inverse taken mod u1^2; u2 is admissible when coprime to u1, of required
// parity, and not excluded. absolute_inner gives
//   sum_h sum_{u1} |inner(h, u1)|,
// otherwise the modulus of the coefficient-weighted signed triple sum.
double trilinear_restricted_sum(const TrilinearParams& params);

} // namespace pellsum::expsum
