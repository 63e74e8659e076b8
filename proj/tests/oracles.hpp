// Independent oracles used by the unit and acceptance suites. Everything
// here is deliberately implemented from first principles, without calling
// into the library paths under test.
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "pellsum/numeric.hpp"
#include "pellsum/pell.hpp"

namespace oracles {

// Brute-force minimal Pell solution: iterate u, test D*u^2 + 1 a square.
// Returns nullopt if no solution with u <= u_bound exists.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>>
brute_pell(std::uint64_t D, std::uint64_t u_bound) {
    for (std::uint64_t u = 1; u <= u_bound; ++u) {
        std::uint64_t v = D * u * u + 1;
        std::uint64_t r = 0;
        if (pellsum::is_square_u64(v, &r)) return std::make_pair(r, u);
    }
    return std::nullopt;
}

// sign of (A + B*sqrt(D)) - (C + E*sqrt(D)) for nonnegative entries
inline int cmp_quad(const mpz_class& A, const mpz_class& B, const mpz_class& C,
                    const mpz_class& E, std::uint64_t D) {
    mpz_class x = A - C; // rational part
    mpz_class y = B - E; // sqrt coefficient
    if (x >= 0 && y >= 0) return (x == 0 && y == 0) ? 0 : 1;
    if (x <= 0 && y <= 0) return -1;
    // opposite signs: compare x^2 against y^2 D
    mpz_class x2 = x * x, y2d = y * y * mpz_class(D);
    if (x > 0) { // x > 0 > y: positive iff x^2 > y^2 D
        return cmp(x2, y2d) > 0 ? 1 : (cmp(x2, y2d) == 0 ? 0 : -1);
    }
    // y > 0 > x
    return cmp(y2d, x2) > 0 ? 1 : (cmp(y2d, x2) == 0 ? 0 : -1);
}

inline void quad_pow(const mpz_class& t, const mpz_class& u, std::uint64_t D, unsigned k,
                     mpz_class& tk, mpz_class& uk) {
    mpz_class rt = 1, ru = 0, bt = t, bu = u, nt, nu;
    mpz_class Dz = D;
    while (k) {
        if (k & 1) {
            nt = rt * bt + Dz * ru * bu;
            nu = rt * bu + ru * bt;
            rt = nt;
            ru = nu;
        }
        k >>= 1;
        if (k) {
            nt = bt * bt + Dz * bu * bu;
            nu = 2 * bt * bu;
            bt = nt;
            bu = nu;
        }
    }
    tk = rt;
    uk = ru;
}

// Exact minimality certificate: (t, u) solves the equation and is not the
// k-th power of a smaller solution for any k >= 2. Relies only on the
// classical fact that all solutions are powers of the minimal one.
inline bool pell_minimality_certificate(std::uint64_t D, const mpz_class& t, const mpz_class& u) {
    if (t * t - mpz_class(D) * u * u != 1) return false;
    double le = pellsum::pell::log_eps(t, u, D);
    // smallest possible unit is 2 + sqrt(3), so k <= log eps / log(3.7)
    auto k_max = static_cast<unsigned>(le / 1.3 + 2.0);
    for (unsigned k = 2; k <= k_max; ++k) {
        // eps'(v) = floor(sqrt(D v^2 + 1)) + v sqrt(D) increases with v, so
        // binary search for the v whose k-th power reaches (t, u)
        mpz_class lo = 1, hi = u - 1;
        if (hi < lo) continue;
        while (lo < hi) {
            mpz_class mid = (lo + hi) / 2;
            mpz_class tv = sqrt(mpz_class(D) * mid * mid + 1);
            mpz_class tk, uk;
            quad_pow(tv, mid, D, k, tk, uk);
            if (cmp_quad(tk, uk, t, u, D) < 0) lo = mid + 1;
            else hi = mid;
        }
        mpz_class tv = sqrt(mpz_class(D) * lo * lo + 1);
        if (tv * tv - mpz_class(D) * lo * lo != 1) continue; // not a solution
        mpz_class tk, uk;
        quad_pow(tv, lo, D, k, tk, uk);
        if (tk == t && uk == u) return false; // found a smaller root
    }
    return true;
}

// 13-smooth style direct oracle: count integers <= N whose prime factors
// all lie in the given list.
inline std::uint64_t smooth_count_from_primes(std::uint64_t N,
                                              const std::vector<std::uint64_t>& primes) {
    std::vector<std::uint64_t> vals = {1};
    for (std::uint64_t p : primes) {
        std::vector<std::uint64_t> next;
        for (std::uint64_t v : vals) {
            std::uint64_t x = v;
            while (x <= N) {
                next.push_back(x);
                if (x > N / p) break;
                x *= p;
            }
        }
        vals = std::move(next);
    }
    return vals.size();
}

} // namespace oracles
