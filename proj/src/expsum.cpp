#include "pellsum/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace pellsum {

namespace {

// Deterministic Miller-Rabin witnesses covering the 64-bit range.
constexpr std::uint64_t kMrWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

} // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : kMrWitnesses) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::uint64_t mod_inverse_u64(std::int64_t x, std::uint64_t m) {
    if (m == 0) throw RangeError("mod_inverse: modulus must be positive");
    if (m == 1) return 0;
    auto mm = static_cast<std::int64_t>(m);
    std::int64_t r = x % mm;
    if (r < 0) r += mm;
    // extended euclid on (r, m); coefficients stay below m in magnitude
    std::int64_t t0 = 0, t1 = 1, r0 = mm, r1 = r;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t tr = r0 - q * r1;
        r0 = r1;
        r1 = tr;
        std::int64_t tt = t0 - q * t1;
        t0 = t1;
        t1 = tt;
    }
    if (r0 != 1) throw NotCoprimeError("mod_inverse: arguments are not coprime");
    if (t0 < 0) t0 += mm;
    return static_cast<std::uint64_t>(t0);
}

} // namespace pellsum

namespace pellsum::expsum {

std::uint64_t mod_inverse(std::int64_t x, std::uint64_t m) { return mod_inverse_u64(x, m); }

namespace {

std::uint64_t reduce_residue(std::int64_t a, std::uint64_t q) {
    std::int64_t r = a % static_cast<std::int64_t>(q);
    if (r < 0) r += static_cast<std::int64_t>(q);
    return static_cast<std::uint64_t>(r);
}

void require_coprime(std::int64_t a, std::uint64_t q, const char* who) {
    std::uint64_t ar = reduce_residue(a, q);
    if (std::gcd(ar, q) != 1) throw NotCoprimeError(std::string(who) + ": gcd(a, q) > 1");
}

SumValue finish(const ComplexAccumulator& acc, std::uint64_t terms) {
    SumValue v;
    auto z = acc.value();
    v.real_part = z.real();
    v.imag_part = z.imag();
    v.term_count = terms;
    v.cancellation_ratio = terms ? v.abs() / static_cast<double>(terms) : 0.0;
    return v;
}

} // namespace

SumValue incomplete_kloosterman_sq(const KloostermanQuery& query) {
    const std::uint64_t q = query.q;
    if (q < 1) throw RangeError("incomplete_kloosterman_sq: q must be positive");
    if (query.N > q) throw RangeError("incomplete_kloosterman_sq: N must satisfy N <= q");
    require_coprime(query.a, q, "incomplete_kloosterman_sq");
    const std::uint64_t a = reduce_residue(query.a, q);

    ComplexAccumulator acc;
    std::uint64_t terms = 0;
    for (std::uint64_t x = 1; x <= query.N; ++x) {
        if (std::gcd(x, q) != 1) continue;
        if (query.excluded && query.excluded->count(x)) continue;
        std::uint64_t inv = mod_inverse_u64(static_cast<std::int64_t>(x % q), q);
        std::uint64_t k = mulmod_u64(a, mulmod_u64(inv, inv, q), q);
        acc.add(unit_phase(k, q));
        ++terms;
    }
    return finish(acc, terms);
}

SumValue complete_square_character_sum(std::uint64_t q, std::int64_t a) {
    if (!is_prime_u64(q)) throw NotPrimeError("complete_square_character_sum: q must be prime");
    require_coprime(a, q, "complete_square_character_sum");
    KloostermanQuery query;
    query.q = q;
    query.a = a;
    query.N = q; // x = q is skipped by the coprimality filter
    return incomplete_kloosterman_sq(query);
}

namespace {

// Elements of one interval admissible for the multilinear sum, stored as
// squared inverses mod q.
std::vector<std::uint64_t> interval_inverse_squares(const IntervalU64& iv, std::uint64_t q,
                                                    bool primes_only, std::uint64_t budget) {
    if (iv.lo > iv.hi) throw RangeError("multilinear_sq_sum: empty interval");
    if (iv.hi - iv.lo >= budget)
        throw BudgetExceededError("multilinear_sq_sum: interval scan exceeds budget");
    std::vector<std::uint64_t> vals;
    for (std::uint64_t x = std::max<std::uint64_t>(iv.lo, 1); x <= iv.hi; ++x) {
        if (primes_only && !is_prime_u64(x)) continue;
        if (std::gcd(x, q) != 1) continue;
        std::uint64_t inv = mod_inverse_u64(static_cast<std::int64_t>(x % q), q);
        vals.push_back(mulmod_u64(inv, inv, q));
    }
    return vals;
}

} // namespace

SumValue multilinear_sq_sum(std::span<const IntervalU64> intervals, std::uint64_t q,
                            std::int64_t a, bool restrict_to_primes,
                            std::optional<std::uint64_t> fixed_cofactor, std::uint64_t budget) {
    if (q < 1) throw RangeError("multilinear_sq_sum: q must be positive");
    if (intervals.empty()) throw RangeError("multilinear_sq_sum: need at least one interval");
    require_coprime(a, q, "multilinear_sq_sum");

    std::uint64_t base = reduce_residue(a, q);
    if (fixed_cofactor) {
        std::uint64_t c = *fixed_cofactor % q;
        if (std::gcd(c, q) != 1) throw NotCoprimeError("multilinear_sq_sum: cofactor not coprime to q");
        std::uint64_t ci = mod_inverse_u64(static_cast<std::int64_t>(c), q);
        base = mulmod_u64(base, mulmod_u64(ci, ci, q), q);
    }

    std::vector<std::vector<std::uint64_t>> lists;
    lists.reserve(intervals.size());
    long double tuple_count = 1.0L;
    for (const auto& iv : intervals) {
        lists.push_back(interval_inverse_squares(iv, q, restrict_to_primes, budget));
        tuple_count *= static_cast<long double>(lists.back().size());
        if (tuple_count > static_cast<long double>(budget))
            throw BudgetExceededError("multilinear_sq_sum: tuple enumeration exceeds budget");
    }

    ComplexAccumulator acc;
    std::uint64_t terms = 0;
    if (std::any_of(lists.begin(), lists.end(), [](const auto& l) { return l.empty(); }))
        return finish(acc, 0);

    // odometer over the r lists; partial[d] = base * prod_{j<d} v_j mod q
    const std::size_t r = lists.size();
    std::vector<std::size_t> idx(r, 0);
    std::vector<std::uint64_t> partial(r + 1);
    partial[0] = base;
    for (std::size_t d = 0; d < r; ++d) partial[d + 1] = mulmod_u64(partial[d], lists[d][0], q);
    for (;;) {
        acc.add(unit_phase(partial[r], q));
        ++terms;
        std::size_t d = r;
        while (d > 0 && idx[d - 1] + 1 == lists[d - 1].size()) {
            idx[d - 1] = 0;
            --d;
        }
        if (d == 0) break;
        ++idx[d - 1];
        for (std::size_t j = d - 1; j < r; ++j) partial[j + 1] = mulmod_u64(partial[j], lists[j][idx[j]], q);
    }
    return finish(acc, terms);
}

DensityMap mu_density(IntervalU64 interval, std::uint32_t ell, std::uint64_t modulus,
                      std::optional<SignsSplit> split, std::uint64_t budget) {
    if (ell < 1) throw RangeError("mu_density: ell must be >= 1");
    if (modulus < 1) throw RangeError("mu_density: modulus must be positive");
    SignsSplit sp = split.value_or(SignsSplit{ell, ell});
    if (sp.plus + sp.minus != 2 * ell)
        throw RangeError("mu_density: signs split must total 2*ell");
    if (interval.hi >= interval.lo && interval.hi - interval.lo >= budget)
        throw BudgetExceededError("mu_density: interval scan exceeds budget");

    std::vector<std::uint64_t> vals; // xbar^2 mod modulus per admissible prime
    for (std::uint64_t x = std::max<std::uint64_t>(interval.lo, 2); x <= interval.hi; ++x) {
        if (!is_prime_u64(x)) continue;
        if (std::gcd(x, modulus) != 1) continue;
        std::uint64_t inv = mod_inverse_u64(static_cast<std::int64_t>(x % modulus), modulus);
        vals.push_back(mulmod_u64(inv, inv, modulus));
    }
    if (vals.empty()) throw RangeError("mu_density: interval has no primes coprime to modulus");

    long double total = std::pow(static_cast<long double>(vals.size()),
                                 static_cast<long double>(2 * ell));
    if (total > static_cast<long double>(budget))
        throw BudgetExceededError("mu_density: tuple enumeration exceeds budget");

    // half distributions built by repeated convolution with the prime values
    auto convolve_power = [&](std::uint32_t times, bool negate) {
        std::unordered_map<std::uint64_t, std::uint64_t> dist;
        dist.emplace(0, 1);
        for (std::uint32_t step = 0; step < times; ++step) {
            std::unordered_map<std::uint64_t, std::uint64_t> next;
            next.reserve(dist.size() * vals.size());
            for (const auto& [s, c] : dist) {
                for (std::uint64_t v : vals) {
                    std::uint64_t w = negate ? (modulus - v) % modulus : v;
                    std::uint64_t z = s + w;
                    if (z >= modulus) z -= modulus;
                    next[z] += c;
                }
            }
            dist = std::move(next);
        }
        return dist;
    };
    auto plus_half = convolve_power(sp.plus, false);
    auto minus_half = convolve_power(sp.minus, true);

    if (static_cast<long double>(plus_half.size()) * static_cast<long double>(minus_half.size()) >
        static_cast<long double>(budget))
        throw BudgetExceededError("mu_density: combination exceeds budget");

    DensityMap dm;
    dm.modulus = modulus;
    dm.ell = ell;
    dm.plus_count = sp.plus;
    dm.minus_count = sp.minus;
    dm.interval = interval;
    dm.prime_count = vals.size();
    for (const auto& [s1, c1] : plus_half) {
        for (const auto& [s2, c2] : minus_half) {
            std::uint64_t z = s1 + s2;
            if (z >= modulus) z -= modulus;
            dm.counts[z] += c1 * c2;
        }
    }
    for (const auto& [z, c] : dm.counts) {
        dm.l1 += c;
        dm.l2_squared += c * c;
        dm.linf = std::max(dm.linf, c);
    }
    return dm;
}

double subprogression_mass(const DensityMap& density, std::uint64_t q1) {
    if (q1 < 1 || density.modulus % q1 != 0)
        throw NotDivisorError("subprogression_mass: q1 must divide the density modulus");
    std::unordered_map<std::uint64_t, std::uint64_t> fibers;
    for (const auto& [z, c] : density.counts) fibers[z % q1] += c;
    std::uint64_t best = 0;
    for (const auto& [xi, mass] : fibers) best = std::max(best, mass);
    if (density.l1 == 0) return 0.0;
    return static_cast<double>(best) / static_cast<double>(density.l1);
}

SubprogressionReport subprogression_report(const DensityMap& density, std::uint64_t q1) {
    SubprogressionReport rep;
    rep.q1 = q1;
    rep.max_fiber_ratio = subprogression_mass(density, q1);
    rep.threshold = std::pow(static_cast<double>(q1), -0.125);
    rep.below_threshold = rep.max_fiber_ratio < rep.threshold;
    return rep;
}

double trilinear_restricted_sum(const TrilinearParams& p) {
    if (p.H < 1) throw RangeError("trilinear_restricted_sum: H must be >= 1");
    if (p.u1_range.lo > p.u1_range.hi || p.u2_range.lo > p.u2_range.hi)
        throw RangeError("trilinear_restricted_sum: empty range");
    for (double c : p.coeffs_h)
        if (std::fabs(c) > 1.0) throw RangeError("trilinear_restricted_sum: |coeffs_h| must be <= 1");
    for (double c : p.coeffs_u1)
        if (std::fabs(c) > 1.0) throw RangeError("trilinear_restricted_sum: |coeffs_u1| must be <= 1");

    std::vector<std::uint64_t> u1s;
    for (std::uint64_t u1 = std::max<std::uint64_t>(p.u1_range.lo, 1); u1 <= p.u1_range.hi; ++u1) {
        if (p.require_odd_u1 && u1 % 2 == 0) continue;
        u1s.push_back(u1);
    }
    if (u1s.empty()) throw RangeError("trilinear_restricted_sum: no admissible u1");
    if (!p.coeffs_h.empty() && p.coeffs_h.size() != p.H)
        throw RangeError("trilinear_restricted_sum: coeffs_h must have size H");
    if (!p.coeffs_u1.empty() && p.coeffs_u1.size() != u1s.size())
        throw RangeError("trilinear_restricted_sum: coeffs_u1 must match the u1 count");

    Accumulator abs_total;
    ComplexAccumulator signed_total;
    long double ops = 0.0L;
    const long double width = static_cast<long double>(p.u2_range.hi - p.u2_range.lo) + 1.0L;
    for (std::size_t i = 0; i < u1s.size(); ++i) {
        std::uint64_t u1 = u1s[i];
        if (u1 > 3037000499ULL) throw RangeError("trilinear_restricted_sum: u1^2 exceeds 63 bits");
        ops += width; // the admissibility scan itself
        if (ops > static_cast<long double>(p.budget))
            throw BudgetExceededError("trilinear_restricted_sum: enumeration exceeds budget");
        std::uint64_t m = u1 * u1;
        std::vector<std::uint64_t> w; // u2bar^2 mod u1^2 over admissible u2
        for (std::uint64_t u2 = std::max<std::uint64_t>(p.u2_range.lo, 1); u2 <= p.u2_range.hi; ++u2) {
            if (p.require_odd_u2 && u2 % 2 == 0) continue;
            if (p.excluded && p.excluded->count(u2)) continue;
            if (std::gcd(u2, u1) != 1) continue;
            std::uint64_t inv = mod_inverse_u64(static_cast<std::int64_t>(u2 % m), m);
            w.push_back(mulmod_u64(inv, inv, m));
        }
        ops += static_cast<long double>(w.size()) * static_cast<long double>(p.H);
        if (ops > static_cast<long double>(p.budget))
            throw BudgetExceededError("trilinear_restricted_sum: enumeration exceeds budget");
        for (std::uint64_t h = 1; h <= p.H; ++h) {
            ComplexAccumulator inner;
            std::uint64_t hm = h % m;
            for (std::uint64_t v : w) inner.add(unit_phase(mulmod_u64(hm, v, m), m));
            auto z = inner.value();
            if (p.absolute_inner) {
                abs_total.add(std::hypot(z.real(), z.imag()));
            } else {
                double ch = p.coeffs_h.empty() ? 1.0 : p.coeffs_h[h - 1];
                double cu = p.coeffs_u1.empty() ? 1.0 : p.coeffs_u1[i];
                signed_total.add(ch * cu * z);
            }
        }
    }
    if (p.absolute_inner) return abs_total.value();
    auto z = signed_total.value();
    return std::hypot(z.real(), z.imag());
}

} // namespace pellsum::expsum
