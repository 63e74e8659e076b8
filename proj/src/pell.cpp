#include "pellsum/pell.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <mpfr.h>

#include "pellsum/numeric.hpp"

namespace pellsum::pell {

namespace {

// log of a positive mpz in long double, from the top 64 bits.
long double log_mpz(const mpz_class& v) {
    std::size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
    if (bits <= 63) {
        return std::log(static_cast<long double>(v.get_ui()));
    }
    mpz_class top = v >> (bits - 63);
    auto mant = static_cast<long double>(top.get_ui());
    return std::log(mant) + static_cast<long double>(bits - 63) * std::numbers::ln2_v<long double>;
}

long double log_eps_l(const mpz_class& t, const mpz_class& u, std::uint64_t D) {
    long double lt = log_mpz(t);
    long double lu = log_mpz(u) + 0.5L * std::log(static_cast<long double>(D));
    long double m = std::max(lt, lu);
    return m + std::log(std::exp(lt - m) + std::exp(lu - m));
}

// Continued-fraction driver. Calls step(hm1, km1) after each new partial
// quotient; a true return aborts. Returns the solution, or nullopt if
// aborted by the callback.
template <typename Abort>
std::optional<PellSolution> pell_cf(std::uint64_t D, Abort&& abort_when) {
    if (D < 2) throw RangeError("fundamental_solution: D must be >= 2");
    std::uint64_t a0 = 0;
    if (is_square_u64(D, &a0)) throw SquareInputError("fundamental_solution: D is a perfect square");

    mpz_class hm2 = 1, hm1 = a0;
    mpz_class km2 = 0, km1 = 1;
    std::uint64_t P = 0, Q = 1, a = a0;

    for (;;) {
        P = a * Q - P;
        Q = (D - P * P) / Q;
        if (Q == 1) {
            PellSolution sol;
            sol.D = D;
            mpz_class norm = hm1 * hm1 - mpz_class(D) * km1 * km1;
            if (norm == 1) {
                sol.t = hm1;
                sol.u = km1;
            } else {
                // norm -1: square the negative unit
                sol.t = hm1 * hm1 + mpz_class(D) * km1 * km1;
                sol.u = 2 * hm1 * km1;
            }
            sol.eps_log = static_cast<double>(log_eps_l(sol.t, sol.u, D));
            return sol;
        }
        if (abort_when(hm1)) return std::nullopt;
        a = (a0 + P) / Q;
        // h_k = a h_{k-1} + h_{k-2}, shifted in place
        mpz_addmul_ui(hm2.get_mpz_t(), hm1.get_mpz_t(), a);
        std::swap(hm1, hm2);
        mpz_addmul_ui(km2.get_mpz_t(), km1.get_mpz_t(), a);
        std::swap(km1, km2);
    }
}

} // namespace

PellSolution fundamental_solution(std::uint64_t D) {
    auto sol = pell_cf(D, [](const mpz_class&) { return false; });
    return *sol; // never aborted
}

std::optional<PellSolution> fundamental_solution_bounded(std::uint64_t D, double log_bound) {
    // Convergent numerators only grow, so h > 4*exp(log_bound) certifies
    // t >= h > bound and hence eps > bound.
    double bound_bits = log_bound / std::numbers::ln2 + 2.0;
    auto sol = pell_cf(D, [bound_bits](const mpz_class& h) {
        return static_cast<double>(mpz_sizeinbase(h.get_mpz_t(), 2)) > bound_bits + 1.0;
    });
    if (!sol) return std::nullopt;
    if (static_cast<double>(log_eps_l(sol->t, sol->u, D)) > log_bound + 1.0) {
        // finished the period but still above the bound
        return std::nullopt;
    }
    return sol;
}

double log_eps(const mpz_class& t, const mpz_class& u, std::uint64_t D) {
    return static_cast<double>(log_eps_l(t, u, D));
}

namespace {

// (t + u sqrt(D))^n = t_n + u_n sqrt(D), exact.
void eps_power(const mpz_class& t, const mpz_class& u, std::uint64_t D, unsigned n,
               mpz_class& tn, mpz_class& un) {
    mpz_class rt = 1, ru = 0, bt = t, bu = u, nt, nu;
    mpz_class Dz = D;
    while (n) {
        if (n & 1) {
            nt = rt * bt + Dz * ru * bu;
            nu = rt * bu + ru * bt;
            rt = nt;
            ru = nu;
        }
        n >>= 1;
        if (n) {
            nt = bt * bt + Dz * bu * bu;
            nu = 2 * bt * bu;
            bt = nt;
            bu = nu;
        }
    }
    tn = rt;
    un = ru;
}

// Exact sign of (tn + un sqrt(D)) - p/q for positive tn, un, p, q.
int cmp_quad_vs_rational(const mpz_class& tn, const mpz_class& un, std::uint64_t D,
                         const mpz_class& p, const mpz_class& q) {
    // tn + un sqrt(D) <=> p/q  <=>  un q sqrt(D) <=> p - tn q
    mpz_class rhs = p - tn * q;
    if (rhs <= 0) return 1; // left side strictly positive
    mpz_class lhs2 = un * un * mpz_class(D) * q * q;
    mpz_class rhs2 = rhs * rhs;
    return cmp(lhs2, rhs2);
}

} // namespace

bool eps_power_leq_D_pow(const PellSolution& sol, unsigned n, double s) {
    mpz_class tn, un;
    eps_power(sol.t, sol.u, sol.D, n, tn, un);

    // Certified rational enclosure of D^s at increasing precision; the two
    // sides can never be equal (eps^n is irrational), so this terminates.
    for (mpfr_prec_t prec = 128; prec <= 8192; prec *= 2) {
        mpfr_t base, lo, hi;
        mpfr_init2(base, prec);
        mpfr_init2(lo, prec);
        mpfr_init2(hi, prec);
        mpfr_set_ui(base, sol.D, MPFR_RNDN);
        mpfr_set_d(lo, s, MPFR_RNDN); // s is exact in double
        mpfr_set(hi, lo, MPFR_RNDN);
        mpfr_pow(lo, base, lo, MPFR_RNDD);
        mpfr_pow(hi, base, hi, MPFR_RNDU);

        mpq_class qlo, qhi;
        mpf_t flo, fhi;
        mpf_init2(flo, prec);
        mpf_init2(fhi, prec);
        mpfr_get_f(flo, lo, MPFR_RNDD);
        mpfr_get_f(fhi, hi, MPFR_RNDU);
        mpq_set_f(qlo.get_mpq_t(), flo);
        mpq_set_f(qhi.get_mpq_t(), fhi);
        mpf_clear(flo);
        mpf_clear(fhi);
        mpfr_clear(base);
        mpfr_clear(lo);
        mpfr_clear(hi);

        if (cmp_quad_vs_rational(tn, un, sol.D, qlo.get_num(), qlo.get_den()) <= 0) return true;
        if (cmp_quad_vs_rational(tn, un, sol.D, qhi.get_num(), qhi.get_den()) > 0) return false;
    }
    throw std::logic_error("eps_power_leq_D_pow: enclosure failed to separate");
}

int count_powers_below(const PellSolution& sol, double s) {
    long double L = log_eps_l(sol.t, sol.u, sol.D);
    long double T = static_cast<long double>(s) * std::log(static_cast<long double>(sol.D));
    if (T <= 0) return 0;
    auto n = static_cast<long long>(T / L);
    // resolve both candidate boundaries through the guard band
    double guard = 1e-9 * std::max(1.0, static_cast<double>(T));
    for (long long cand = std::max(1LL, n); cand <= n + 1; ++cand) {
        long double diff = static_cast<long double>(cand) * L - T;
        bool below;
        if (std::fabs(static_cast<double>(diff)) < guard) {
            below = eps_power_leq_D_pow(sol, static_cast<unsigned>(cand), s);
        } else {
            below = diff <= 0;
        }
        if (below) n = std::max<long long>(n, cand);
        else { n = cand - 1; break; }
    }
    return static_cast<int>(std::max(0LL, n));
}

namespace {

struct CountAccumulator {
    std::uint64_t fundamental = 0;
    std::uint64_t all_powers = 0;
};

// Counts over nonsquare D in [lo, hi]; comparison bound D^(1/2+alpha).
CountAccumulator count_range(std::uint64_t lo, std::uint64_t hi, double alpha) {
    CountAccumulator acc;
    double s = 0.5 + alpha;
    std::uint64_t sq = isqrt_u64(lo);
    for (std::uint64_t D = lo; D <= hi; ++D) {
        while ((sq + 1) * (sq + 1) <= D) ++sq;
        if (sq * sq == D) continue;
        double log_bound = s * std::log(static_cast<double>(D));
        auto sol = fundamental_solution_bounded(D, log_bound);
        if (!sol) continue;
        int n = count_powers_below(*sol, s);
        if (n >= 1) {
            acc.fundamental += 1;
            acc.all_powers += static_cast<std::uint64_t>(n);
        }
    }
    return acc;
}

} // namespace

SolutionCount count_solutions(std::uint64_t x, double alpha) {
    if (x < 2) throw RangeError("count_solutions: x must be >= 2");
    if (!(alpha > 0.0)) throw RangeError("count_solutions: alpha must be > 0");

    SolutionCount result;
    result.x = x;
    result.alpha = alpha;

    // Independent blocks; exact integer reduction is order-free.
    constexpr std::uint64_t kBlock = 4096;
    std::uint64_t n_blocks = (x - 1 + kBlock) / kBlock;
    std::uint64_t cf = 0, ca = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : cf, ca)
    for (long long b = 0; b < static_cast<long long>(n_blocks); ++b) {
        std::uint64_t lo = 2 + static_cast<std::uint64_t>(b) * kBlock;
        std::uint64_t hi = std::min<std::uint64_t>(x, lo + kBlock - 1);
        CountAccumulator acc = count_range(lo, hi, alpha);
        cf += acc.fundamental;
        ca += acc.all_powers;
    }
    result.count_fundamental = cf;
    result.count_all_powers = ca;

    double pi2 = std::numbers::pi * std::numbers::pi;
    double lx = std::log(static_cast<double>(x));
    result.main_term = 4.0 * alpha * alpha / pi2 * std::sqrt(static_cast<double>(x)) * lx * lx;
    return result;
}

namespace {

std::uint64_t count_all_powers_or_zero(std::uint64_t x, double alpha) {
    if (!(alpha > 0.0)) return 0; // defining set empty: eps_D > sqrt(D) >= D^(1/2+alpha)
    return count_solutions(x, alpha).count_all_powers;
}

} // namespace

PowerIdentityReport check_power_identity(std::uint64_t x, double alpha) {
    if (x < 2) throw RangeError("check_power_identity: x must be >= 2");
    if (alpha < 0.0 || alpha > 1.5) throw RangeError("check_power_identity: alpha must be in [0, 3/2]");

    PowerIdentityReport rep;
    rep.x = x;
    rep.alpha = alpha;
    if (alpha > 0.0) {
        SolutionCount c = count_solutions(x, alpha);
        rep.S = c.count_all_powers;
        rep.S_fundamental = c.count_fundamental;
    }
    rep.S_shift_half = count_all_powers_or_zero(x, alpha / 2.0 - 0.5);
    rep.S_shift_quarter = count_all_powers_or_zero(x, alpha / 2.0 - 0.25);
    rep.residual_half = static_cast<std::int64_t>(rep.S) - static_cast<std::int64_t>(rep.S_fundamental)
        - static_cast<std::int64_t>(rep.S_shift_half);
    rep.residual_quarter = static_cast<std::int64_t>(rep.S) - static_cast<std::int64_t>(rep.S_fundamental)
        - static_cast<std::int64_t>(rep.S_shift_quarter);
    return rep;
}

} // namespace pellsum::pell
