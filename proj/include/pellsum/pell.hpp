#pragma once

#include <cstdint>
#include <optional>

#include <gmpxx.h>

#include "pellsum/errors.hpp"

namespace pellsum::pell {

// Minimal solution of t^2 - D*u^2 = 1 for nonsquare D >= 2.
// eps_log is the natural log of the unit eps_D = t + u*sqrt(D).
struct PellSolution {
    std::uint64_t D = 0;
    mpz_class t;
    mpz_class u;
    double eps_log = 0.0;
};

// Computed by the continued-fraction expansion of sqrt(D): run the P,Q
// recursion until the period closes (Q returns to 1); the convergent there
// is the fundamental solution of norm +1 or -1, and the -1 case is squared.
// Throws SquareInputError for perfect squares, RangeError for D < 2.
PellSolution fundamental_solution(std::uint64_t D);

// Same expansion, but gives up as soon as the convergent numerator provably
// exceeds exp(log_bound) (convergent numerators increase monotonically, so
// every later solution is larger). nullopt means eps_D > exp(log_bound).
std::optional<PellSolution> fundamental_solution_bounded(std::uint64_t D, double log_bound);

// log(t + u*sqrt(D)) in extended precision, good to ~1e-18 relative.
double log_eps(const mpz_class& t, const mpz_class& u, std::uint64_t D);

// Number of powers n >= 1 with eps_D^n <= D^s.  Decided in log space with a
// 1e-9 relative guard band; ambiguous comparisons fall back to an exact
// test of t_n + u_n*sqrt(D) (integer power recursion) against certified
// rational enclosures of D^s.
int count_powers_below(const PellSolution& sol, double s);

// Exact comparison eps^n <= D^s via outward-rounded rational bounds on D^s.
bool eps_power_leq_D_pow(const PellSolution& sol, unsigned n, double s);

struct SolutionCount {
    std::uint64_t x = 0;
    double alpha = 0.0;
    std::uint64_t count_fundamental = 0;   // #{D <= x nonsquare : eps_D <= D^(1/2+alpha)}
    std::uint64_t count_all_powers = 0;    // additionally counts eps_D^n, n >= 1, below the bound
    double main_term = 0.0;                // (4 alpha^2 / pi^2) sqrt(x) (log x)^2
};

// Counts only positive powers eps_D^n (n >= 1); the sign/negative-power
// variants of the solution group are not separate members.
SolutionCount count_solutions(std::uint64_t x, double alpha);

struct PowerIdentityReport {
    std::uint64_t x = 0;
    double alpha = 0.0;
    std::uint64_t S = 0;               // all-powers count at alpha
    std::uint64_t S_fundamental = 0;
    std::uint64_t S_shift_half = 0;    // S(x, alpha/2 - 1/2), 0 when the set is empty
    std::uint64_t S_shift_quarter = 0; // S(x, alpha/2 - 1/4), 0 when the set is empty
    std::int64_t residual_half = 0;    // S - S_f - S(x, alpha/2 - 1/2)
    std::int64_t residual_quarter = 0; // S - S_f - S(x, alpha/2 - 1/4)
};

// Reports both candidate shifts for the all-powers/fundamental identity
// (the alpha/2 - 1/4 variant is the one observed to close exactly).
PowerIdentityReport check_power_identity(std::uint64_t x, double alpha);

} // namespace pellsum::pell
