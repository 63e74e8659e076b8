#include "pellsum/fouvry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pellsum/numeric.hpp"

namespace pellsum::fouvry {

HooleyCoefficients coefficient_table(double alpha) {
    if (!(alpha > 0.0)) throw RangeError("coefficient_table: alpha must be > 0");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    HooleyCoefficients c;
    c.alpha = alpha;
    double base = 4.0 / pi2 * (alpha - 0.25);
    if (alpha <= 1.0) {
        c.B_alpha = base;
    } else if (alpha <= 2.5) {
        c.B_alpha = base + (alpha - 1.0) * (alpha - 1.0) / (18.0 * pi2);
    } else {
        c.B_alpha = base + (alpha - 1.75) / (6.0 * pi2);
    }
    c.fouvry_lower_06 = (1.0 + (2.0 * alpha - 1.0) * (3.0 - 2.0 * alpha)) / pi2;
    c.fouvry_lower_319 = (1.0 + (alpha - 0.5) * (5.5 - 3.0 * alpha)) / pi2;
    c.main_factor = 4.0 * alpha * alpha / pi2;
    c.delta_exponent_claim =
        "conjectured main-term deficit O((alpha - 1/2)^(2+c)) for an unspecified c > 0";
    return c;
}

namespace {

// square roots of 1 modulo p^k
std::vector<std::uint64_t> unit_roots_prime_power(std::uint64_t p, unsigned k) {
    std::uint64_t pk = 1;
    for (unsigned i = 0; i < k; ++i) pk *= p;
    if (p != 2) return {1 % pk, pk - 1};
    if (k == 1) return {1};
    if (k == 2) return {1, 3};
    std::uint64_t half = pk / 2;
    std::vector<std::uint64_t> out = {1, half - 1, half + 1, pk - 1};
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::vector<std::uint64_t> sqrt_one_residues(std::uint64_t u, ResidueMode mode,
                                             std::uint64_t budget) {
    if (u < 1) throw RangeError("sqrt_one_residues: u must be >= 1");
    if (u == 1) return {0}; // the single residue mod 1
    if (u > 3037000499ULL) throw RangeError("sqrt_one_residues: u^2 exceeds 63 bits");
    const std::uint64_t m = u * u;

    bool scan = (mode == ResidueMode::Scan) ||
                (mode == ResidueMode::Auto && m <= budget);
    if (scan) {
        if (m > budget) throw BudgetExceededError("sqrt_one_residues: scan exceeds budget");
        std::vector<std::uint64_t> out;
        for (std::uint64_t x = 0; x < m; ++x) {
            if (mulmod_u64(x, x, m) == 1 % m) out.push_back(x);
        }
        return out;
    }

    // CRT over the prime-power factors of u^2
    std::vector<std::uint64_t> roots = {0};
    std::uint64_t modulus_so_far = 1;
    std::uint64_t rest = u;
    for (std::uint64_t p = 2; p * p <= rest || rest > 1;) {
        if (rest == 1) break;
        if (p * p > rest) p = rest;
        if (rest % p != 0) {
            ++p;
            continue;
        }
        unsigned k = 0;
        while (rest % p == 0) {
            rest /= p;
            ++k;
        }
        std::uint64_t pk = 1;
        for (unsigned i = 0; i < 2 * k; ++i) pk *= p;
        auto local = unit_roots_prime_power(p, 2 * k);
        std::vector<std::uint64_t> next;
        next.reserve(roots.size() * local.size());
        // combine x = r (mod M), x = s (mod pk)
        std::uint64_t M = modulus_so_far;
        for (std::uint64_t rr : roots) {
            for (std::uint64_t s : local) {
                if (M == 1) {
                    next.push_back(s);
                    continue;
                }
                std::uint64_t Minv = mod_inverse_u64(static_cast<std::int64_t>(M % pk), pk);
                std::uint64_t diff = (s + pk - rr % pk) % pk;
                std::uint64_t t = mulmod_u64(diff, Minv, pk);
                next.push_back(rr + M * t);
            }
        }
        roots = std::move(next);
        modulus_so_far = M * pk;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::uint64_t phi_pair(std::uint64_t u1, std::uint64_t u2) {
    if (u1 < 2 || u2 < 2) throw RangeError("phi_pair: u1, u2 must be >= 2 (inverse mod 1 degenerates)");
    if (std::gcd(u1, u2) != 1) throw NotCoprimeError("phi_pair: u1, u2 must be coprime");
    std::uint64_t prod = u1 * u2;
    if (prod > 3037000499ULL) throw RangeError("phi_pair: (u1*u2)^2 exceeds 63 bits");
    const std::uint64_t m = prod * prod;
    const std::uint64_t m1 = u1 * u1, m2 = u2 * u2;
    std::uint64_t i1 = mod_inverse_u64(static_cast<std::int64_t>(u1 % m2), m2); // mod u2^2
    std::uint64_t i2 = mod_inverse_u64(static_cast<std::int64_t>(u2 % m1), m1); // mod u1^2
    std::uint64_t term1 = mulmod_u64(mulmod_u64(i1, i1, m), m1 % m, m);
    std::uint64_t term2 = mulmod_u64(mulmod_u64(i2, i2, m), m2 % m, m);
    return (term2 + m - term1) % m;
}

RangeParameters range_parameters(std::uint64_t x, double alpha, std::uint64_t u) {
    if (x < 2) throw RangeError("range_parameters: x must be >= 2");
    if (!(alpha > 0.0)) throw RangeError("range_parameters: alpha must be > 0");
    if (u < 1) throw RangeError("range_parameters: u must be >= 1");
    RangeParameters rp;
    double xd = static_cast<double>(x);
    rp.X_alpha = 0.5 * (std::pow(xd, alpha) - std::pow(xd, -1.0 - alpha));
    rp.Y2 = std::pow(2.0, 1.0 / (2.0 * alpha)) *
            std::pow(static_cast<double>(u), 1.0 + 1.0 / (2.0 * alpha));
    rp.Y3 = static_cast<double>(u) * std::sqrt(xd);
    rp.y2_approximate = true;
    return rp;
}

double admissible_main_term(std::uint64_t x, double alpha, std::uint64_t budget) {
    if (x < 2) throw RangeError("admissible_main_term: x must be >= 2");
    if (!(alpha > 0.0)) throw RangeError("admissible_main_term: alpha must be > 0");
    if (x > 10'000'000'000ULL) throw BudgetExceededError("admissible_main_term: x exceeds 1e10");

    const double xd = static_cast<double>(x);
    const double xa = std::pow(xd, alpha);
    auto u1_max = static_cast<std::uint64_t>(std::pow(xd, 0.25) + 1e-9);

    Accumulator acc;
    long double ops = 0.0L;
    for (std::uint64_t u1 = 1; u1 <= u1_max; ++u1) {
        if (u1 % 2 == 0) continue; // u1*u2 odd needs both odd
        // lower bound: smallest u2 with (u1 u2)^2 >= x, exact in integers
        std::uint64_t lo = isqrt_u64(x) / u1;
        while ((u1 * lo) * (u1 * lo) < x) ++lo;
        // caps: u2 <= x^alpha / u1 (real) and u2^2 <= x u1^2 (exact)
        auto cap1 = static_cast<std::uint64_t>(xa / static_cast<double>(u1) + 1e-9);
        std::uint64_t cap2 = isqrt_u64(x * u1 * u1);
        std::uint64_t hi = std::min(cap1, cap2);
        if (hi < lo) continue;
        ops += static_cast<long double>(hi - lo + 1);
        if (ops > static_cast<long double>(budget))
            throw BudgetExceededError("admissible_main_term: lattice enumeration exceeds budget");
        for (std::uint64_t u2 = lo; u2 <= hi; ++u2) {
            if (u2 % 2 == 0) continue;
            if (std::gcd(u1, u2) != 1) continue;
            acc.add(1.0 / (static_cast<double>(u1) * static_cast<double>(u2)));
        }
    }
    return 8.0 * std::sqrt(xd) * acc.value();
}

ExcludedDeficitReport excluded_deficit(std::uint64_t x, double alpha, double beta,
                                       std::uint32_t r, std::uint64_t budget) {
    if (x < 2) throw RangeError("excluded_deficit: x must be >= 2");
    if (!(alpha > 0.0)) throw RangeError("excluded_deficit: alpha must be > 0");
    if (!(beta > 0.0) || beta >= 1.0) throw RangeError("excluded_deficit: beta must be in (0, 1)");

    ExcludedDeficitReport rep;
    rep.x = x;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.r = r;

    const double xd = static_cast<double>(x);
    const double lo1 = std::pow(xd, 0.25);
    const double hi1 = std::pow(xd, alpha / 2.0);
    Accumulator h1;
    for (std::uint64_t u1 = static_cast<std::uint64_t>(lo1) + 1;
         static_cast<double>(u1) < hi1; ++u1) {
        if (static_cast<double>(u1) <= lo1) continue;
        h1.add(1.0 / static_cast<double>(u1));
    }
    rep.u1_harmonic = h1.value();

    const double hi2 = std::pow(xd, alpha - 0.25);
    Accumulator h2;
    long double sieved = 0.0L;
    for (std::uint64_t U2 = 1; static_cast<double>(U2) < hi2; U2 <<= 1) {
        if (static_cast<double>(U2) <= lo1) continue;
        rep.u2_grid.push_back(U2);
        sieved += static_cast<long double>(U2);
        if (sieved > static_cast<long double>(budget))
            throw BudgetExceededError("excluded_deficit: sieve work exceeds budget");
        factor::ExceptionalParams params;
        params.N = U2;
        params.beta = beta;
        params.r = r;
        params.spacing = true;
        factor::ExceptionalSet E = factor::exceptional_set(params);
        for (std::uint64_t u2 = 1; u2 <= U2; ++u2) {
            if (E.mask[u2]) h2.add(1.0 / static_cast<double>(u2));
        }
    }
    rep.exceptional_harmonic = h2.value();
    rep.deficit = std::sqrt(xd) * rep.u1_harmonic * rep.exceptional_harmonic;

    // fit the exponent C in (alpha-1/2)^2 beta (log 1/beta)^C sqrt(x) (log x)^2
    const double lx = std::log(xd);
    const double shape_base = (alpha - 0.5) * (alpha - 0.5) * beta * std::sqrt(xd) * lx * lx;
    const double log_inv_beta = std::log(1.0 / beta);
    rep.fitted_C = 0.0;
    rep.ratio_at_fit = 0.0;
    if (rep.deficit > 0.0 && shape_base > 0.0 && log_inv_beta > 0.0) {
        double best = std::numeric_limits<double>::infinity();
        for (double C = 0.0; C <= 8.0 + 1e-9; C += 0.25) {
            double ref = shape_base * std::pow(log_inv_beta, C);
            double err = std::fabs(std::log(rep.deficit / ref));
            if (err < best) {
                best = err;
                rep.fitted_C = C;
                rep.ratio_at_fit = rep.deficit / ref;
            }
        }
    }
    return rep;
}

TrilinearProbeReport restricted_bound_probe(expsum::IntervalU64 u1_range,
                                            expsum::IntervalU64 u2_range, double beta,
                                            std::uint32_t r, std::uint64_t h_max,
                                            std::uint64_t budget) {
    if (u1_range.lo > u1_range.hi || u2_range.lo > u2_range.hi)
        throw RangeError("restricted_bound_probe: empty range");
    if (h_max < 1) throw RangeError("restricted_bound_probe: h_max must be >= 1");

    TrilinearProbeReport rep;
    rep.u1_range = u1_range;
    rep.u2_range = u2_range;
    rep.beta = beta;
    rep.r = r;

    factor::ExceptionalParams params;
    params.N = u2_range.hi;
    params.beta = beta;
    params.r = r;
    params.spacing = true;
    factor::ExceptionalSet E = factor::exceptional_set(params);
    for (std::uint64_t u2 = std::max<std::uint64_t>(u2_range.lo, 1); u2 <= u2_range.hi; ++u2)
        if (E.mask[u2]) ++rep.excluded_count;

    long double ops = 0.0L;
    const long double width = static_cast<long double>(u2_range.hi - u2_range.lo) + 1.0L;
    for (std::uint64_t u1 = std::max<std::uint64_t>(u1_range.lo, 2); u1 <= u1_range.hi; ++u1) {
        if (u1 > 3037000499ULL) throw RangeError("restricted_bound_probe: u1^2 exceeds 63 bits");
        ops += width;
        if (ops > static_cast<long double>(budget))
            throw BudgetExceededError("restricted_bound_probe: enumeration exceeds budget");
        const std::uint64_t m = u1 * u1;
        std::vector<std::uint64_t> w;
        for (std::uint64_t u2 = std::max<std::uint64_t>(u2_range.lo, 1); u2 <= u2_range.hi; ++u2) {
            if (E.mask[u2]) continue;
            if (std::gcd(u2, u1) != 1) continue;
            std::uint64_t inv = mod_inverse_u64(static_cast<std::int64_t>(u2 % m), m);
            w.push_back(mulmod_u64(inv, inv, m));
        }
        ops += static_cast<long double>(w.size()) * static_cast<long double>(h_max);
        if (ops > static_cast<long double>(budget))
            throw BudgetExceededError("restricted_bound_probe: enumeration exceeds budget");
        for (std::uint64_t h = 1; h <= h_max; ++h) {
            ComplexAccumulator inner;
            std::uint64_t hm = h % m;
            for (std::uint64_t v : w) inner.add(unit_phase(mulmod_u64(hm, v, m), m));
            auto z = inner.value();
            TrilinearProbeRow row;
            row.h = h;
            row.u1 = u1;
            row.gcd_h_u1sq = std::gcd(h, m);
            row.admissible_count = w.size();
            row.abs_inner = std::hypot(z.real(), z.imag());
            row.ratio = w.empty() ? 0.0 : row.abs_inner / static_cast<double>(w.size());
            row.gcd_shape = w.empty() ? 0.0
                                      : static_cast<double>(row.gcd_h_u1sq) /
                                            static_cast<double>(w.size());
            rep.rows.push_back(row);
        }
    }
    return rep;
}

} // namespace pellsum::fouvry
