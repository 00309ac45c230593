#pragma once

#include <cstdint>
#include <vector>

#include "ticketforge/linalg.hpp"
#include "ticketforge/rng.hpp"

namespace ticketforge {

namespace detail {

inline int nth_prime(std::size_t n) {
    static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
    return primes[n % (sizeof(primes) / sizeof(primes[0]))];
}

inline double radical_inverse(uint64_t i, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % static_cast<uint64_t>(base));
        i /= static_cast<uint64_t>(base);
        f *= inv;
    }
    return r;
}

}  // namespace detail

// Low-discrepancy domain sample: box corners first (when the dimension is
// small enough to enumerate), then a seed-shifted Halton sequence. Growing n
// extends the set without moving earlier points, so a max over the samples is
// non-decreasing in n.
inline std::vector<Vec> domain_samples(const Box& box, std::size_t n, uint64_t seed) {
    std::size_t d = box.dim();
    std::vector<Vec> pts;
    pts.reserve(n);
    if (d <= 10) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << d) && pts.size() < n; ++mask) {
            Vec x(d);
            for (std::size_t j = 0; j < d; ++j)
                x[j] = (mask >> j) & 1 ? box.high[j] : box.low[j];
            pts.push_back(std::move(x));
        }
    }
    Vec shift(d);
    for (std::size_t j = 0; j < d; ++j) shift[j] = unit_at(seed, {0x68u, j});
    for (uint64_t i = 1; pts.size() < n; ++i) {
        Vec x(d);
        for (std::size_t j = 0; j < d; ++j) {
            double u = detail::radical_inverse(i, detail::nth_prime(j)) + shift[j];
            u -= static_cast<uint64_t>(u);
            x[j] = box.low[j] + (box.high[j] - box.low[j]) * u;
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

}  // namespace ticketforge
