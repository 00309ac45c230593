#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ticketforge/rng.hpp"
#include "ticketforge/subsetsum.hpp"

using namespace ticketforge;

namespace {

// Independent oracle: a second full enumeration, coded differently from
// solve_exhaustive (flat mask loop, explicit comparator, no pruning).
SubsetSolution oracle_exhaustive(const SubsetSumProblem& p) {
    int m = static_cast<int>(p.candidates.size());
    int cap = p.effective_cap();
    uint64_t best_mask = 0;  // the empty set, always admissible
    bool best_ach = std::abs(p.z) <= p.eps;
    double best_res = std::abs(p.z);
    int best_card = 0;
    for (uint64_t mask = 1; mask < (1ull << m); ++mask) {
        int card = __builtin_popcountll(mask);
        if (card > cap) continue;
        std::vector<int> idx;
        for (int i = 0; i < m; ++i)
            if (mask & (1ull << i)) idx.push_back(i);
        double res = subset_residual(p, idx);
        bool ach = res <= p.eps;
        bool better;
        if (ach != best_ach) {
            better = ach;
        } else if (ach) {
            better = card < best_card || (card == best_card && res < best_res) ||
                     (card == best_card && res == best_res &&
                      (mask & ((mask ^ best_mask) & -(mask ^ best_mask))) != 0 &&
                      mask != best_mask);
        } else {
            better = res < best_res || (res == best_res && card < best_card) ||
                     (res == best_res && card == best_card &&
                      (mask & ((mask ^ best_mask) & -(mask ^ best_mask))) != 0 &&
                      mask != best_mask);
        }
        if (better) {
            best_mask = mask;
            best_ach = ach;
            best_res = res;
            best_card = card;
        }
    }
    SubsetSolution s;
    for (int i = 0; i < m; ++i)
        if (best_mask & (1ull << i)) s.indices.push_back(i);
    s.residual = subset_residual(p, s.indices);
    s.achieved = s.residual <= p.eps;
    return s;
}

SubsetSumProblem random_problem(uint64_t seed, int m, double eps) {
    Rng r(seed, {0x7465u});
    SubsetSumProblem p;
    p.z = r.uniform_sym(1.0);
    for (int i = 0; i < m; ++i) p.candidates.push_back(r.uniform_sym(1.0));
    p.eps = eps;
    p.max_subset_size = m;
    return p;
}

double greedy_residual(const SubsetSumProblem& p) {
    std::vector<int> picked;
    double sum = 0.0;
    std::vector<bool> used(p.candidates.size(), false);
    for (;;) {
        int best = -1;
        double best_res = std::abs(p.z - sum);
        for (std::size_t i = 0; i < p.candidates.size(); ++i) {
            if (used[i]) continue;
            double res = std::abs(p.z - sum - p.candidates[i]);
            if (res < best_res) {
                best = static_cast<int>(i);
                best_res = res;
            }
        }
        if (best < 0) break;
        used[static_cast<std::size_t>(best)] = true;
        sum += p.candidates[static_cast<std::size_t>(best)];
        picked.push_back(best);
    }
    return std::abs(p.z - sum);
}

}  // namespace

TEST_CASE("solve_exhaustive: z=0 returns empty set") {
    SubsetSumProblem p;
    p.z = 0.0;
    p.candidates = {0.4, -0.3, 0.9};
    p.eps = 0.01;
    SubsetSolution s = solve_exhaustive(p);
    REQUIRE(s.achieved);
    REQUIRE(s.indices.empty());
    REQUIRE(s.residual == 0.0);
}

TEST_CASE("solve_exhaustive: exact three-element hit") {
    SubsetSumProblem p;
    p.z = 0.375;
    p.candidates = {0.5, -0.25, 0.125};
    p.eps = 1e-12;
    SubsetSolution s = solve_exhaustive(p);
    REQUIRE(s.achieved);
    REQUIRE(s.indices == std::vector<int>{0, 1, 2});
    REQUIRE(s.residual == 0.0);
}

TEST_CASE("solve_exhaustive: matches independent oracle") {
    for (uint64_t seed = 0; seed < 300; ++seed) {
        SubsetSumProblem p = random_problem(seed, 12, 0.01);
        SubsetSolution a = solve_exhaustive(p);
        SubsetSolution b = oracle_exhaustive(p);
        REQUIRE(a.achieved == b.achieved);
        REQUIRE(a.indices == b.indices);
        REQUIRE(std::abs(a.residual - b.residual) <= 1e-15);
    }
}

TEST_CASE("solve_exhaustive: size guard") {
    SubsetSumProblem p;
    p.candidates.assign(26, 0.1);
    p.z = 0.5;
    p.eps = 0.01;
    REQUIRE_THROWS_AS(solve_exhaustive(p), SizeError);
}

TEST_CASE("solve_mitm: equals solve_exhaustive on random instances") {
    for (uint64_t seed = 0; seed < 200; ++seed) {
        int m = 8 + static_cast<int>(seed % 13);  // 8..20
        SubsetSumProblem p = random_problem(seed, m, 0.005);
        SubsetSolution a = solve_exhaustive(p);
        SubsetSolution b = solve_mitm(p);
        REQUIRE(a.achieved == b.achieved);
        REQUIRE(a.indices.size() == b.indices.size());
        REQUIRE(a.indices == b.indices);
        REQUIRE(std::abs(a.residual - b.residual) <= 1e-15);
    }
}

TEST_CASE("solve_mitm: minimal cardinality with exact ties") {
    SubsetSumProblem p;
    p.z = 1.0;
    p.candidates.assign(6, 0.5);
    p.eps = 0.0;
    p.max_subset_size = 6;
    SubsetSolution s = solve_mitm(p);
    REQUIRE(s.achieved);
    REQUIRE(s.indices.size() == 2);
    REQUIRE(s.indices == std::vector<int>{0, 1});  // lex-smallest pair
    REQUIRE(s.residual == 0.0);
}

TEST_CASE("solve_mitm: beats greedy baseline at m=30") {
    for (uint64_t seed = 100; seed < 120; ++seed) {
        SubsetSumProblem p = random_problem(seed, 30, 1e-9);
        SubsetSolution s = solve_mitm(p);
        REQUIRE(s.residual <= greedy_residual(p) + 1e-15);
    }
}

TEST_CASE("solve_mitm: size guard") {
    SubsetSumProblem p;
    p.candidates.assign(45, 0.1);
    p.z = 0.5;
    p.eps = 0.01;
    REQUIRE_THROWS_AS(solve_mitm(p), SizeError);
}

TEST_CASE("residual recomputation is exact") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
        SubsetSumProblem p = random_problem(seed, 16, 0.01);
        SubsetSolution s = solve_mitm(p);
        REQUIRE(subset_residual(p, s.indices) == s.residual);
    }
}

TEST_CASE("max_subset_size defaults to 10 only at m=20") {
    // 20 candidates of 0.1: z=1.5 needs 15 > default cap 10
    SubsetSumProblem p;
    p.candidates.assign(20, 0.1);
    p.z = 1.5;
    p.eps = 1e-9;
    REQUIRE_FALSE(solve_exhaustive(p).achieved);
    // at m=19 the cap is unbounded and 15 elements are allowed
    p.candidates.assign(19, 0.1);
    REQUIRE(solve_exhaustive(p).achieved);
}

TEST_CASE("success_rate: m=0 analytic check") {
    double rate = success_rate(uniform_sampler(), 0, 0.01, uniform_sampler(), 10000, 7);
    REQUIRE(rate == Catch::Approx(0.01).margin(0.005));
}

TEST_CASE("success_rate: deterministic given seed") {
    double a = success_rate(uniform_sampler(), 8, 0.01, uniform_sampler(), 2000, 11);
    double b = success_rate(uniform_sampler(), 8, 0.01, uniform_sampler(), 2000, 11);
    REQUIRE(a == b);
}

TEST_CASE("success_rate: monotone in m and eps (with slack)") {
    double m10 = success_rate(product_sampler(), 10, 0.01, uniform_sampler(), 5000, 3);
    double m15 = success_rate(product_sampler(), 15, 0.01, uniform_sampler(), 5000, 3);
    REQUIRE(m15 >= m10 - 0.02);
    double tight = success_rate(uniform_sampler(), 10, 0.001, uniform_sampler(), 5000, 3);
    double loose = success_rate(uniform_sampler(), 10, 0.01, uniform_sampler(), 5000, 3);
    REQUIRE(loose >= tight - 0.02);
}

TEST_CASE("min_m_for: trivial and small cases") {
    // |z| <= 1 = eps always solvable with the empty subset
    REQUIRE(min_m_for(uniform_sampler(), 1.0, 0.99, 5, uniform_sampler(), 2000) == 0);
    REQUIRE(min_m_for(uniform_sampler(), 0.5, 0.5, 5, uniform_sampler(), 2000) <= 3);
}

TEST_CASE("min_m_for: unattainable target throws") {
    // z in [-1,1] but all candidates 0: only z near 0 solvable
    Sampler zero = [](Rng&) { return 0.0; };
    REQUIRE_THROWS_AS(min_m_for(zero, 1e-3, 0.9, 5, uniform_sampler(), 500), SizeError);
}
