#pragma once

#include <cstdint>
#include <initializer_list>

namespace ticketforge {

// Counter-based random streams. Every draw is a pure function of
// (seed, stream tags, counter), so per-layer / per-entry substreams are
// independent of evaluation order and of each other: inserting a layer or
// solving blocks in parallel never shifts anybody else's draws.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) {
    return splitmix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

class Rng {
public:
    explicit Rng(uint64_t seed) : key_(splitmix64(seed)) {}

    Rng(uint64_t seed, std::initializer_list<uint64_t> tags) : key_(splitmix64(seed)) {
        for (uint64_t t : tags) key_ = hash_combine(key_, t);
    }

    // Child stream; the parent is not advanced.
    Rng fork(uint64_t tag) const {
        Rng r(*this);
        r.key_ = hash_combine(r.key_, tag);
        r.counter_ = 0;
        return r;
    }

    uint64_t next_u64() { return splitmix64(key_ + ++counter_); }

    // Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // U[-h, h]
    double uniform_sym(double h) { return uniform(-h, h); }

    bool bernoulli(double p) { return next_unit() < p; }

private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

// One-shot value keyed by arbitrary tags; used for per-entry parameter draws.
inline double unit_at(uint64_t seed, std::initializer_list<uint64_t> tags) {
    uint64_t k = splitmix64(seed);
    for (uint64_t t : tags) k = hash_combine(k, t);
    return static_cast<double>(splitmix64(k) >> 11) * 0x1.0p-53;
}

inline double uniform_at(uint64_t seed, std::initializer_list<uint64_t> tags, double half_range) {
    return (2.0 * unit_at(seed, tags) - 1.0) * half_range;
}

}  // namespace ticketforge
