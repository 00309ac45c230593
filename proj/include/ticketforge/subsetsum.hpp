#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ticketforge/common.hpp"
#include "ticketforge/rng.hpp"

namespace ticketforge {

// Approximate z by the sum of a subset of candidates, |z - sum| <= eps.
struct SubsetSumProblem {
    double z = 0.0;
    std::vector<double> candidates;
    double eps = 0.0;
    // Optional cardinality cap. Unset: capped at 10 for m == 20 (the pool
    // configuration used for sparsity-oriented pruning), otherwise unbounded.
    std::optional<int> max_subset_size;

    int size() const { return static_cast<int>(candidates.size()); }
    int effective_cap() const {
        if (max_subset_size) return *max_subset_size;
        return size() == 20 ? 10 : size();
    }
};

struct SubsetSolution {
    std::vector<int> indices;  // ascending
    double residual = 0.0;
    bool achieved = false;
};

// Residuals are always recomputed by summing the chosen values in ascending
// index order, so both solvers and any independent oracle agree bit-for-bit.
inline double subset_residual(const SubsetSumProblem& p, const std::vector<int>& idx) {
    double s = 0.0;
    for (int k : idx) s += p.candidates[static_cast<std::size_t>(k)];
    return std::abs(p.z - s);
}

namespace detail {

// Lexicographic order on ascending index sets, encoded as bitmasks: the set
// whose earliest divergent index is present compares smaller.
inline bool lex_less(uint64_t a, uint64_t b) {
    uint64_t d = a ^ b;
    if (d == 0) return false;
    return (a & (d & (~d + 1))) != 0;
}

struct Best {
    bool valid = false;
    int card = 0;
    double residual = 0.0;
    uint64_t mask = 0;

    // minimal cardinality, then smaller residual, then lex-smallest indices
    bool better_achieved(int c, double r, uint64_t m) const {
        if (!valid) return true;
        if (c != card) return c < card;
        if (r != residual) return r < residual;
        return lex_less(m, mask);
    }
    // smaller residual, then cardinality, then lex (fallback when nothing
    // meets the tolerance)
    bool better_overall(int c, double r, uint64_t m) const {
        if (!valid) return true;
        if (r != residual) return r < residual;
        if (c != card) return c < card;
        return lex_less(m, mask);
    }
    void set(int c, double r, uint64_t m) {
        valid = true;
        card = c;
        residual = r;
        mask = m;
    }
};

inline std::vector<int> mask_to_indices(uint64_t mask) {
    std::vector<int> idx;
    for (int i = 0; mask != 0; ++i, mask >>= 1)
        if (mask & 1) idx.push_back(i);
    return idx;
}

}  // namespace detail

// Full enumeration, minimal-cardinality contract. Guarded at m <= 25.
inline SubsetSolution solve_exhaustive(const SubsetSumProblem& p) {
    const int m = p.size();
    if (m > 25) throw SizeError("solve_exhaustive: m > 25");
    const int cap = p.effective_cap();
    detail::Best achieved, overall;

    // DFS in ascending index order; every partial path is one subset and its
    // running sum matches an ascending-order recomputation exactly.
    std::function<void(int, uint64_t, double, int)> dfs =
        [&](int start, uint64_t mask, double sum, int card) {
            double r = std::abs(p.z - sum);
            if (r <= p.eps && achieved.better_achieved(card, r, mask)) achieved.set(card, r, mask);
            if (overall.better_overall(card, r, mask)) overall.set(card, r, mask);
            if (card == cap) return;
            for (int i = start; i < m; ++i) dfs(i + 1, mask | (1ULL << i), sum + p.candidates[i], card + 1);
        };
    dfs(0, 0, 0.0, 0);

    const detail::Best& pick = achieved.valid ? achieved : overall;
    SubsetSolution sol;
    sol.indices = detail::mask_to_indices(pick.mask);
    sol.residual = subset_residual(p, sol.indices);
    sol.achieved = achieved.valid;
    return sol;
}

namespace detail {

struct HalfEntry {
    double sum;
    uint32_t mask;  // within the half
};

// all subsets of x[base .. base+n), grouped by cardinality, sorted by sum
inline std::vector<std::vector<HalfEntry>> enumerate_half(const std::vector<double>& x,
                                                          int base, int n, int cap) {
    std::vector<std::vector<HalfEntry>> groups(static_cast<std::size_t>(std::min(n, cap)) + 1);
    std::function<void(int, uint32_t, double, int)> dfs = [&](int start, uint32_t mask,
                                                              double sum, int card) {
        groups[static_cast<std::size_t>(card)].push_back({sum, mask});
        if (card == std::min(n, cap)) return;
        for (int i = start; i < n; ++i)
            dfs(i + 1, mask | (1u << i), sum + x[static_cast<std::size_t>(base + i)], card + 1);
    };
    dfs(0, 0, 0.0, 0);
    for (auto& g : groups)
        std::sort(g.begin(), g.end(), [](const HalfEntry& a, const HalfEntry& b) {
            return a.sum < b.sum;
        });
    return groups;
}

}  // namespace detail

// Meet-in-the-middle solver with the same contract as solve_exhaustive
// (minimal cardinality first). Guarded at m <= 44.
inline SubsetSolution solve_mitm(const SubsetSumProblem& p) {
    const int m = p.size();
    if (m > 44) throw SizeError("solve_mitm: m > 44");
    const int cap = p.effective_cap();
    const int na = m / 2;
    const int nb = m - na;
    auto ga = detail::enumerate_half(p.candidates, 0, na, cap);
    auto gb = detail::enumerate_half(p.candidates, na, nb, cap);

    auto full_mask = [&](uint32_t am, uint32_t bm) {
        return static_cast<uint64_t>(am) | (static_cast<uint64_t>(bm) << na);
    };
    auto exact_residual = [&](uint64_t mask) {
        return subset_residual(p, detail::mask_to_indices(mask));
    };

    detail::Best achieved, overall;
    // consider a candidate pair, using the exactly recomputed residual
    auto consider = [&](uint32_t am, double, uint32_t bm, int card) {
        uint64_t mask = full_mask(am, bm);
        double r = exact_residual(mask);
        if (r <= p.eps && achieved.better_achieved(card, r, mask)) achieved.set(card, r, mask);
        if (overall.better_overall(card, r, mask)) overall.set(card, r, mask);
    };

    for (int c = 0; c <= cap; ++c) {
        for (int ca = 0; ca <= c; ++ca) {
            int cb = c - ca;
            if (ca >= static_cast<int>(ga.size()) || cb >= static_cast<int>(gb.size())) continue;
            const auto& A = ga[static_cast<std::size_t>(ca)];
            const auto& B = gb[static_cast<std::size_t>(cb)];
            if (A.empty() || B.empty()) continue;
            for (const auto& a : A) {
                double want = p.z - a.sum;
                auto it = std::lower_bound(B.begin(), B.end(), want,
                                           [](const detail::HalfEntry& e, double v) {
                                               return e.sum < v;
                                           });
                // check the straddling neighbours plus exact-sum ties on both sides
                auto probe = [&](std::ptrdiff_t off) {
                    auto q = it + off;
                    if (q < B.begin() || q >= B.end()) return;
                    consider(a.mask, a.sum, q->mask, c);
                };
                for (std::ptrdiff_t off = -2; off <= 2; ++off) probe(off);
            }
        }
        if (achieved.valid && achieved.card == c) break;  // min cardinality settled
    }

    const detail::Best& pick = achieved.valid ? achieved : overall;
    SubsetSolution sol;
    sol.indices = detail::mask_to_indices(pick.mask);
    sol.residual = subset_residual(p, sol.indices);
    sol.achieved = achieved.valid;
    return sol;
}

inline SubsetSolution solve_auto(const SubsetSumProblem& p) {
    return p.size() <= 20 ? solve_exhaustive(p) : solve_mitm(p);
}

// Pure feasibility: does any subset reach within eps of z? No cardinality
// cap; meet-in-the-middle with early exit. Used by Monte-Carlo statistics.
inline bool subset_exists(double z, const std::vector<double>& x_in, double eps) {
    if (static_cast<int>(x_in.size()) > 44) throw SizeError("subset_exists: m > 44");
    if (std::abs(z) <= eps) return true;
    // zero values never change any subset sum
    std::vector<double> x;
    x.reserve(x_in.size());
    for (double v : x_in)
        if (v != 0.0) x.push_back(v);
    const int m = static_cast<int>(x.size());
    const int na = m / 2;
    const int nb = m - na;
    std::vector<double> sums_b;
    sums_b.reserve(1u << nb);
    sums_b.push_back(0.0);
    for (int i = 0; i < nb; ++i) {
        std::size_t n = sums_b.size();
        for (std::size_t k = 0; k < n; ++k) sums_b.push_back(sums_b[k] + x[static_cast<std::size_t>(na + i)]);
    }
    std::sort(sums_b.begin(), sums_b.end());

    std::vector<double> sums_a;
    sums_a.reserve(1u << na);
    sums_a.push_back(0.0);
    for (int i = 0; i < na; ++i) {
        std::size_t n = sums_a.size();
        for (std::size_t k = 0; k < n; ++k) sums_a.push_back(sums_a[k] + x[static_cast<std::size_t>(i)]);
    }
    for (double sa : sums_a) {
        double want = z - sa;
        auto it = std::lower_bound(sums_b.begin(), sums_b.end(), want - eps);
        if (it != sums_b.end() && *it <= want + eps) return true;
    }
    return false;
}

using Sampler = std::function<double(Rng&)>;

inline Sampler uniform_sampler(double half_range = 1.0) {
    return [half_range](Rng& r) { return r.uniform_sym(half_range); };
}

// U[-1,1] * U[0,1]: the two-for-one product variable
inline Sampler product_sampler() {
    return [](Rng& r) { return r.uniform_sym(1.0) * r.next_unit(); };
}

// Fraction of trials in which some subset approximates z within eps.
// Each trial draws from its own index-derived stream, so the result is
// deterministic given the seed and independent of scheduling.
inline double success_rate(const Sampler& dist, int m, double eps, const Sampler& z_sampler,
                           int trials, uint64_t seed) {
    if (trials < 1) throw DomainError("success_rate: trials must be >= 1");
    int hits = 0;
    std::vector<double> x(static_cast<std::size_t>(m));
    for (int t = 0; t < trials; ++t) {
        Rng r(seed, {0x7472u, static_cast<uint64_t>(t)});
        double z = z_sampler(r);
        for (auto& v : x) v = dist(r);
        hits += subset_exists(z, x, eps);
    }
    return static_cast<double>(hits) / trials;
}

// Smallest m whose empirical success rate reaches target_rate. Monotonicity
// is enforced by walking down from the binary-search result.
inline int min_m_for(const Sampler& dist, double eps, double target_rate, uint64_t seed,
                     const Sampler& z_sampler, int trials = 10000, int m_cap = 44) {
    if (!(target_rate > 0.0 && target_rate < 1.0))
        throw DomainError("min_m_for: target_rate must be in (0,1)");
    std::vector<double> cache(static_cast<std::size_t>(m_cap) + 1, -1.0);
    auto rate = [&](int m) {
        auto& c = cache[static_cast<std::size_t>(m)];
        if (c < 0.0) c = success_rate(dist, m, eps, z_sampler, trials, seed);
        return c;
    };
    if (rate(0) >= target_rate) return 0;
    // grow by doubling so the expensive large-m rates are only sampled when needed
    int lo = 0, hi = 1;
    while (rate(hi) < target_rate) {
        if (hi == m_cap)
            throw SizeError("min_m_for: target rate unattainable within m <= " + std::to_string(m_cap));
        lo = hi;
        hi = std::min(hi * 2, m_cap);
    }
    while (lo + 1 < hi) {
        int mid = (lo + hi) / 2;
        if (rate(mid) >= target_rate)
            hi = mid;
        else
            lo = mid;
    }
    lo = hi;
    while (lo > 0 && rate(lo - 1) >= target_rate) --lo;
    return lo;
}

}  // namespace ticketforge
