#pragma once

// Independent reference computations used by the tests. None of these share
// code with the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline long double log_choose(std::uint32_t n, std::uint32_t k) {
    return std::lgammal(n + 1.0L) - std::lgammal(k + 1.0L) - std::lgammal(n - k + 1.0L);
}

inline long double binom_pmf(std::uint32_t n, std::uint32_t k, long double p) {
    if (p == 0.0L) return k == 0 ? 1.0L : 0.0L;
    return std::exp(log_choose(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
}

// Direct summation of each tail separately.
inline long double lower_tail(std::uint32_t n, std::uint32_t c, long double p) {
    long double s = 0.0L;
    for (std::uint32_t i = 0; i <= c && i <= n; ++i) s += binom_pmf(n, i, p);
    return s;
}

inline long double upper_tail(std::uint32_t n, std::uint32_t c, long double p) {
    long double s = 0.0L;
    for (std::uint32_t i = c + 1; i <= n; ++i) s += binom_pmf(n, i, p);
    return s;
}

struct HopExpectation {
    double arrive = 0.0;     // P(data got through within r attempts)
    double bits_given_arrival = 0.0;
};

// Walks every outcome sequence of up to r attempts; a success ends the sequence.
inline HopExpectation enumerate_hop(double pf, double pp, double ps, int r, double D, double A) {
    long double mass = 0.0L, weighted = 0.0L;
    std::function<void(int, bool, long double, long double)> walk = [&](int k, bool arrived, long double prob,
                                                                         long double bits) {
        if (k == r) {
            if (arrived) {
                mass += prob;
                weighted += prob * bits;
            }
            return;
        }
        walk(k + 1, arrived, prob * pf, bits + D);
        walk(k + 1, true, prob * pp, bits + D + A);
        const long double p_end = prob * ps;
        mass += p_end;
        weighted += p_end * (bits + D + A);
    };
    walk(0, false, 1.0L, 0.0L);
    return {static_cast<double>(mass), static_cast<double>(weighted / mass)};
}

// E[bits of m fragments | at least one lost], by enumerating all 2^m outcomes.
inline double enumerate_fragments(int m, double q, double e_s, double e_f) {
    long double mass = 0.0L, weighted = 0.0L;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        int lost = 0;
        long double prob = 1.0L;
        for (int j = 0; j < m; ++j) {
            if (mask >> j & 1u) {
                ++lost;
                prob *= 1.0L - q;
            } else {
                prob *= q;
            }
        }
        if (lost == 0) continue;
        mass += prob;
        weighted += prob * (lost * e_f + (m - lost) * e_s);
    }
    return static_cast<double>(weighted / mass);
}

}  // namespace oracle
