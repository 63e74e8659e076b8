#include "pellsum/amplify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <gmpxx.h>

#include "pellsum/numeric.hpp"

namespace pellsum::amplify {

bool ell_window_holds(double beta_i, std::uint32_t ell) {
    double l = static_cast<double>(ell);
    return beta_i * (8.0 * l - 2.0) < 1.0 && 1.0 <= beta_i * (8.0 * l + 6.0);
}

std::uint32_t choose_ell(double beta_i) {
    if (!(beta_i > 0.0) || beta_i > 1.0) throw RangeError("choose_ell: beta must be in (0, 1]");
    // smallest l with 1 <= beta*(8l+6); the epsilon keeps ceil from
    // overshooting on boundary values like beta = 1/14
    double raw = (1.0 / beta_i - 6.0) / 8.0;
    auto l = static_cast<std::int64_t>(std::ceil(raw - 1e-12));
    if (l < 1) l = 1;
    while (beta_i * (8.0 * static_cast<double>(l) + 6.0) < 1.0) ++l;
    return static_cast<std::uint32_t>(l);
}

AmplificationPlan make_plan(std::uint64_t q, double rho, double beta,
                            std::span<const double> beta_i) {
    if (q < 2) throw RangeError("make_plan: q must be >= 2");
    if (!(rho > 0.0) || rho > 1.0) throw RangeError("make_plan: rho must be in (0, 1]");
    if (!(beta > 0.0) || beta >= 1.0) throw RangeError("make_plan: beta must be in (0, 1)");
    if (beta_i.empty()) throw RangeError("make_plan: need at least one interval exponent");
    AmplificationPlan plan;
    plan.q = q;
    plan.rho = rho;
    plan.beta = beta;
    plan.r = static_cast<std::uint32_t>(beta_i.size());
    for (double b : beta_i) {
        if (b < rho * beta - 1e-12)
            throw RangeError("make_plan: interval exponent below rho*beta");
        plan.beta_i.push_back(b);
        plan.ell_i.push_back(choose_ell(b));
    }
    return plan;
}

Lemma2Instance lemma2_enumerate(std::uint32_t ell,
                                std::span<const std::vector<std::uint32_t>> prime_sets,
                                std::uint64_t budget) {
    if (ell < 1) throw RangeError("lemma2_enumerate: ell must be >= 1");
    if (prime_sets.size() != ell)
        throw RangeError("lemma2_enumerate: need exactly ell prime sets");
    long double half = 1.0L;
    for (const auto& s : prime_sets) {
        if (s.empty()) throw RangeError("lemma2_enumerate: empty prime set");
        for (std::uint32_t p : s)
            if (!is_prime_u64(p)) throw RangeError("lemma2_enumerate: sets must contain primes");
        half *= static_cast<long double>(s.size());
    }
    if (half * half > static_cast<long double>(budget))
        throw BudgetExceededError("lemma2_enumerate: tuple enumeration exceeds budget");

    // Group the half tuples by exact value of sum 1/x^2, and within a value
    // by multiset. Both halves draw from the same per-slot sets, so one
    // enumeration covers both sides.
    std::map<mpq_class, std::map<std::vector<std::uint32_t>, std::uint64_t>> groups;
    std::vector<std::size_t> idx(ell, 0);
    std::vector<std::uint32_t> sorted;
    for (;;) {
        mpq_class sum = 0;
        for (std::uint32_t i = 0; i < ell; ++i) {
            std::uint64_t x = prime_sets[i][idx[i]];
            sum += mpq_class(1, x * x);
        }
        sorted.clear();
        for (std::uint32_t i = 0; i < ell; ++i) sorted.push_back(prime_sets[i][idx[i]]);
        std::sort(sorted.begin(), sorted.end());
        groups[sum][sorted] += 1;

        std::size_t d = ell;
        while (d > 0 && idx[d - 1] + 1 == prime_sets[d - 1].size()) {
            idx[d - 1] = 0;
            --d;
        }
        if (d == 0) break;
        ++idx[d - 1];
    }

    Lemma2Instance inst;
    inst.ell = ell;
    inst.prime_sets.assign(prime_sets.begin(), prime_sets.end());
    for (const auto& [sum, by_multiset] : groups) {
        std::uint64_t total = 0;
        for (const auto& [ms, c] : by_multiset) {
            total += c;
            inst.matched += c * c;
        }
        inst.solutions += total * total;
    }
    return inst;
}

HolderReport holder_amplification_check(const AmplificationPlan& plan, std::int64_t a,
                                        std::span<const expsum::IntervalU64> intervals,
                                        std::uint64_t budget) {
    if (intervals.size() != plan.r)
        throw RangeError("holder_amplification_check: need one interval per exponent");
    const std::uint64_t q = plan.q;

    HolderReport rep;
    expsum::SumValue S = expsum::multilinear_sq_sum(intervals, q, a, true, std::nullopt, budget);
    rep.abs_S = S.abs();
    rep.s_terms = S.term_count;

    std::vector<expsum::DensityMap> mus;
    mus.reserve(plan.r);
    long double combo = 1.0L;
    for (std::uint32_t i = 0; i < plan.r; ++i) {
        mus.push_back(expsum::mu_density(intervals[i], plan.ell_i[i], q, std::nullopt, budget));
        combo *= static_cast<long double>(mus.back().counts.size());
        if (combo > static_cast<long double>(budget))
            throw BudgetExceededError("holder_amplification_check: residue-tuple sum exceeds budget");
    }

    // density-weighted character sum over residue tuples
    {
        ComplexAccumulator acc;
        std::uint64_t ar = [&] {
            std::int64_t v = a % static_cast<std::int64_t>(q);
            if (v < 0) v += static_cast<std::int64_t>(q);
            return static_cast<std::uint64_t>(v);
        }();
        std::vector<std::map<std::uint64_t, std::uint64_t>::const_iterator> its;
        for (const auto& mu : mus) its.push_back(mu.counts.begin());
        std::vector<std::uint64_t> zprod(plan.r + 1);
        std::vector<double> wprod(plan.r + 1);
        zprod[0] = ar;
        wprod[0] = 1.0;
        for (std::uint32_t d = 0; d < plan.r; ++d) {
            zprod[d + 1] = mulmod_u64(zprod[d], its[d]->first, q);
            wprod[d + 1] = wprod[d] * static_cast<double>(its[d]->second);
        }
        for (;;) {
            auto z = unit_phase(zprod[plan.r], q);
            acc.add({z.real() * wprod[plan.r], z.imag() * wprod[plan.r]});
            std::uint32_t d = plan.r;
            while (d > 0) {
                ++its[d - 1];
                if (its[d - 1] != mus[d - 1].counts.end()) break;
                its[d - 1] = mus[d - 1].counts.begin();
                --d;
            }
            if (d == 0) break;
            for (std::uint32_t j = d - 1; j < plan.r; ++j) {
                zprod[j + 1] = mulmod_u64(zprod[j], its[j]->first, q);
                wprod[j + 1] = wprod[j] * static_cast<double>(its[j]->second);
            }
        }
        auto zv = acc.value();
        rep.sum_z_real = zv.real();
        rep.sum_z_imag = zv.imag();
    }

    // moment inequality in log space:
    //   E * log|S| <= (E - 2 l_i per slot) * sum log pi_i + log(sum over z)
    // with E = 2^r l_1 ... l_r.
    double E = std::pow(2.0, static_cast<double>(plan.r));
    for (std::uint32_t l : plan.ell_i) E *= static_cast<double>(l);
    double sum_log_pi = 0.0;
    double deficit = 0.0;
    for (std::uint32_t i = 0; i < plan.r; ++i) {
        sum_log_pi += std::log(static_cast<double>(mus[i].prime_count));
        deficit += 2.0 * static_cast<double>(plan.ell_i[i]) *
                   std::log(static_cast<double>(mus[i].prime_count));
    }
    rep.log_lhs = rep.abs_S > 0 ? E * std::log(rep.abs_S)
                                : -std::numeric_limits<double>::infinity();
    double z_real = std::max(rep.sum_z_real, 0.0);
    rep.log_rhs = E * sum_log_pi - deficit +
                  (z_real > 0 ? std::log(z_real) : -std::numeric_limits<double>::infinity());
    rep.holder_ok = rep.log_lhs <= rep.log_rhs + 1e-9 * std::max(1.0, std::fabs(rep.log_rhs));

    double log_q = std::log(static_cast<double>(q));
    for (std::uint32_t i = 0; i < plan.r; ++i) {
        HolderIntervalReport ir;
        ir.interval = intervals[i];
        ir.prime_count = mus[i].prime_count;
        ir.ell = plan.ell_i[i];
        ir.l1 = mus[i].l1;
        ir.l2_squared = mus[i].l2_squared;
        ir.linf = mus[i].linf;
        double tl = 2.0 * static_cast<double>(ir.ell);
        double log_mass_bound = tl * (std::log(4.0 * static_cast<double>(ir.ell)) +
                                      std::log(static_cast<double>(ir.prime_count)));
        ir.l2_mass_ok = std::log(static_cast<double>(ir.l2_squared)) < log_mass_bound;
        ir.linf_ok = std::log(static_cast<double>(ir.linf)) <
                     std::log(static_cast<double>(ir.l1)) - log_q / 8.0;
        ir.window_margin = plan.beta_i[i] * (8.0 * static_cast<double>(ir.ell) - 2.0);
        ir.count_proxy_ok = tl * std::log(static_cast<double>(ir.prime_count)) > log_q / 8.0;
        rep.intervals.push_back(ir);
    }
    return rep;
}

CancellationReport proposition_cancellation(std::uint64_t q, double rho, double beta,
                                            std::uint32_t r, std::uint32_t sample_count,
                                            std::uint64_t seed) {
    if (q < 2) throw RangeError("proposition_cancellation: q must be >= 2");
    if (!(rho > 0.0) || rho > 1.0) throw RangeError("proposition_cancellation: rho must be in (0, 1]");
    auto N = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(q), rho)));
    if (N < 100) throw RangeError("proposition_cancellation: N = ceil(q^rho) must be >= 100");
    if (N > factor::kSieveBudget)
        throw BudgetExceededError("proposition_cancellation: N exceeds sieve budget");

    factor::ExceptionalParams params;
    params.N = N;
    params.beta = beta;
    params.r = r;
    params.spacing = true;
    factor::ExceptionalSet E = factor::exceptional_set(params);

    // the restricted x list and their squared inverses are sample-independent
    std::vector<std::uint64_t> invsq;
    for (std::uint64_t x = 1; x <= N; ++x) {
        if (E.mask[x]) continue;
        if (std::gcd(x, q) != 1) continue;
        std::uint64_t inv = mod_inverse_u64(static_cast<std::int64_t>(x % q), q);
        invsq.push_back(mulmod_u64(inv, inv, q));
    }

    CancellationReport rep;
    rep.q = q;
    rep.rho = rho;
    rep.N = N;
    rep.beta = beta;
    rep.r = r;
    rep.seed = seed;
    rep.exceptional_density = E.density();

    SplitMix64 rng(seed);
    rep.samples.reserve(sample_count);
    for (std::uint32_t i = 0; i < sample_count; ++i) {
        std::uint64_t a;
        do {
            a = 1 + rng.next_below(q - 1);
        } while (std::gcd(a, q) != 1);
        ComplexAccumulator acc;
        for (std::uint64_t v : invsq) acc.add(unit_phase(mulmod_u64(a, v, q), q));
        auto z = acc.value();
        rep.samples.push_back({a, std::hypot(z.real(), z.imag()) / static_cast<double>(N)});
    }

    std::vector<double> sorted;
    for (const auto& s : rep.samples) sorted.push_back(s.ratio);
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty()) {
        rep.max_ratio = sorted.back();
        std::size_t n = sorted.size();
        rep.median_ratio = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }
    return rep;
}

} // namespace pellsum::amplify
