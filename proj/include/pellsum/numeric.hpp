#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>

#include "pellsum/errors.hpp"

namespace pellsum {

// Compensated accumulator based on the error-free two-sum transform.
// The running error term is carried exactly, so summing 1e8 unit-magnitude
// terms keeps absolute error at the level of a single rounding.
struct Accumulator {
    double hi = 0.0;
    double lo = 0.0;

    void add(double x) {
        double s  = hi + x;
        double bv = s - hi;
        double e  = (hi - (s - bv)) + (x - bv);
        hi = s;
        lo += e;
    }
    double value() const { return hi + lo; }
};

struct ComplexAccumulator {
    Accumulator re, im;
    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    std::complex<double> value() const { return {re.value(), im.value()}; }
};

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    if (m == 1) return 0;
    std::uint64_t r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return r;
}

inline std::uint64_t isqrt_u64(std::uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    if (r > 0xFFFFFFFFULL) r = 0xFFFFFFFFULL;
    while (r > 0 && r * r > n) --r;
    while (r < 0xFFFFFFFFULL && (r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline bool is_square_u64(std::uint64_t n, std::uint64_t* root = nullptr) {
    std::uint64_t r = isqrt_u64(n);
    if (root) *root = r;
    return r * r == n;
}

// Deterministic Miller-Rabin for the full 64-bit range.
bool is_prime_u64(std::uint64_t n);

// exp(2*pi*i * k/q) with k already reduced to [0, q).
inline std::complex<double> unit_phase(std::uint64_t k, std::uint64_t q) {
    double ang = 2.0 * std::numbers::pi * (static_cast<double>(k) / static_cast<double>(q));
    return {std::cos(ang), std::sin(ang)};
}

// Canonical inverse in [0, m). Throws NotCoprimeError / RangeError.
std::uint64_t mod_inverse_u64(std::int64_t x, std::uint64_t m);

// Small deterministic PRNG (splitmix64); stdlib distributions are
// implementation-defined, this keeps sampled outputs stable everywhere.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // Uniform in [0, bound) by rejection, bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

} // namespace pellsum
