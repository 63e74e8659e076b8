#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pellsum/errors.hpp"
#include "pellsum/expsum.hpp"

namespace pellsum::factor {

inline constexpr std::uint64_t kSieveBudget = 100'000'000;

// Prime factorization of n with multiplicity, largest first.
struct FactorProfile {
    std::uint64_t n = 1;
    std::vector<std::uint32_t> primes_desc;
};

// Smallest-prime-factor table for 1..N; all profile queries run against the
// frozen array, so concurrent reads are safe.
class SpfTable {
public:
    static SpfTable build(std::uint64_t n_max);

    std::uint64_t n_max() const { return n_max_; }
    std::uint32_t spf(std::uint64_t n) const;
    FactorProfile profile(std::uint64_t n) const;

    // Descending prime factors written into out (cleared first).
    void factor_desc(std::uint64_t n, std::vector<std::uint32_t>& out) const;

    // Binary cache: "SPF1" magic, N as little-endian u64, then N+1
    // little-endian u32 entries (spf[0] = 0, spf[1] = 1).
    void save(const std::string& path) const;
    static SpfTable load(const std::string& path);

    // Cache file keyed by N inside cache_dir (spf_<N>.bin); loads when
    // present, otherwise builds and writes it.
    static SpfTable load_or_build_cached(const std::string& cache_dir, std::uint64_t n_max);

private:
    std::uint64_t n_max_ = 0;
    std::vector<std::uint32_t> spf_;
};

inline SpfTable sieve_profiles(std::uint64_t n_max) { return SpfTable::build(n_max); }

// Exact count of 1 <= n <= N whose largest prime factor is <= y (n = 1 counts).
std::uint64_t psi_smooth_count(std::uint64_t N, double y);
std::uint64_t psi_smooth_count(const SpfTable& table, std::uint64_t N, double y);

struct ExceptionalParams {
    std::uint64_t N = 2;
    double beta = 0.05;
    std::uint32_t r = 1;
    bool spacing = true;          // exclude n whose top-r primes are not well separated
    bool strict_spacing = false;  // additionally test p_r against the cofactor's largest prime
};

// E = { n <= N : fewer than r prime factors, or p_r <= N^beta, or (spacing)
// p_i <= (1 + 10/log N) p_{i+1} for some i < r among the top-r factors }.
// Purely arithmetic: no modulus enters the definition.
struct ExceptionalSet {
    ExceptionalParams params;
    std::vector<std::uint8_t> mask;   // mask[n] = 1 iff n in E, indices 0..N (0 unused)
    std::uint64_t size = 0;

    double density() const { return static_cast<double>(size) / static_cast<double>(params.N); }
    double lemma_budget() const;      // beta * (log 1/beta)^r
    double spacing_budget() const;    // log log N / log N
    bool contains(std::uint64_t n) const { return n < mask.size() && mask[n] != 0; }
};

ExceptionalSet exceptional_set(const ExceptionalParams& params);
ExceptionalSet exceptional_set(const ExceptionalParams& params, const SpfTable& table);

// One cell of the geometric grid M_k = N * (1 - 1/log N)^k per coordinate.
struct Box {
    std::vector<std::uint32_t> cells;  // grid indices, increasing (M decreasing)
    std::vector<double> M;             // interval right endpoints, one per coordinate
    double cofactor_bound = 0.0;       // 2N / (M_1 ... M_r)
    std::vector<std::uint64_t> members;
};

struct BoxDecomposition {
    ExceptionalParams params;
    std::vector<Box> boxes;            // sorted by cell key; empty boxes dropped
    std::uint64_t member_total = 0;
    std::uint64_t exceptional_size = 0;
};

// Assigns every n in {1..N}\E to the box keyed by the grid cells of its r
// largest prime factors. Requires the spacing flag (separation of the top-r
// factors is what makes the cells strictly ordered).
BoxDecomposition box_partition(const ExceptionalParams& params);
BoxDecomposition box_partition(const ExceptionalParams& params, const SpfTable& table);

struct PartitionIdentityReport {
    std::complex<double> direct;  // sum over x <= N, x not in E, (x,q)=1 of e_q(a xbar^2)
    std::complex<double> boxed;   // same sum assembled box by box from factored members
    double residual = 0.0;        // |direct - boxed|
    std::uint64_t box_count = 0;
    std::uint64_t term_count = 0;
};

// Both sides enumerate the same x set; the boxed side evaluates each member
// through the product of the inverses of its top-r primes and cofactor.
PartitionIdentityReport partition_sum_identity(const ExceptionalParams& params,
                                               std::uint64_t q,
                                               std::int64_t a);
PartitionIdentityReport partition_sum_identity(const ExceptionalParams& params,
                                               std::uint64_t q,
                                               std::int64_t a,
                                               const SpfTable& table);

} // namespace pellsum::factor
