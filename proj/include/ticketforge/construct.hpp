#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ticketforge/activation.hpp"
#include "ticketforge/budget.hpp"
#include "ticketforge/common.hpp"
#include "ticketforge/init.hpp"
#include "ticketforge/network.hpp"
#include "ticketforge/subsetsum.hpp"
#include "ticketforge/ticket.hpp"

namespace ticketforge {

struct ConstructConfig {
    double eps = 0.05;
    double delta = 0.05;
    int m = 10;        // first-wave pool size per block
    int attempts = 3;  // retry waves; total capacity per pool is m * attempts
    uint64_t seed = 0;
    double C = 1.0;
    double gamma = 0.1;
};

namespace detail {

// A labelled subset-sum candidate: the source column it comes from plus its
// position within the pool (waves take pool-position prefixes).
struct Candidate {
    int col;
    int pos;
    double value;
};

constexpr int kMitmCap = 44;

// Solve with escalating waves: the w-th attempt admits the first w*m usable
// candidates, and a final wave admits everything up to the MITM cap. Returns
// the first achieving solution, else the best effort of the final wave.
inline SubsetSolution solve_waves(double z, double tol, const std::vector<Candidate>& cands,
                                  int m, int attempts, std::vector<int>* picked_cols) {
    SubsetSolution best;
    int avail = std::min(static_cast<int>(cands.size()), kMitmCap);
    int prev_limit = -1;
    for (int w = 1; w <= attempts + 1; ++w) {
        int limit = w <= attempts ? std::min(w * m, avail) : avail;
        if (limit == prev_limit) break;  // no untouched capacity left
        prev_limit = limit;
        SubsetSumProblem p;
        p.z = z;
        p.eps = tol;
        std::vector<int> cols;
        for (int i = 0; i < limit; ++i) {
            p.candidates.push_back(cands[static_cast<std::size_t>(i)].value);
            cols.push_back(cands[static_cast<std::size_t>(i)].col);
        }
        p.max_subset_size = limit;
        SubsetSolution sol = solve_auto(p);
        picked_cols->clear();
        for (int i : sol.indices) picked_cols->push_back(cols[static_cast<std::size_t>(i)]);
        best = sol;
        if (sol.achieved) return sol;
    }
    return best;
}

struct Pool {
    int base = 0;
    int cap = 0;  // positions per half (mirrored pools imply partner at +h)
    int col(int k) const { return base + k; }
};

// Shared construction state: the source being masked plus bookkeeping.
struct Builder {
    const Network* target = nullptr;
    ConstructConfig cfg;
    Ticket ticket;
    ErrorBudget budget;
    std::vector<Vec> comp_sup;  // per target layer, per neuron |value| bound

    int m_cap() const { return cfg.m * cfg.attempts; }

    Layer& src(int l) { return ticket.source.layers[static_cast<std::size_t>(l)]; }
    MaskLayer& mask(int l) { return ticket.masks[static_cast<std::size_t>(l)]; }

    void keep_weight(int l, int i, int j) {
        mask(l).weights[static_cast<std::size_t>(i) * src(l).weights.cols() +
                        static_cast<std::size_t>(j)] = 1;
    }
    void keep_bias(int l, int i) { mask(l).bias[static_cast<std::size_t>(i)] = 1; }

    void record(BlockRecord rec) { ticket.manifest.blocks.push_back(std::move(rec)); }

    [[noreturn]] void fail(int layer, int row, int target_in, const SubsetSolution& sol) {
        throw BlockFailure("block failure: source layer " + std::to_string(layer) +
                           ", output copy row " + std::to_string(row) + ", input neuron " +
                           std::to_string(target_in) + "; best residual " +
                           std::to_string(sol.residual) + " after " +
                           std::to_string(cfg.attempts) + " attempts");
    }
};

// Per-neuron output magnitude bounds of the target, by interval propagation.
// Used for the linearization radius (sigma needs |w x_j| <= a per component).
inline std::vector<Vec> component_sups(const Network& net) {
    std::vector<Vec> sup;
    std::vector<Interval> cur;
    Vec in_sup;
    for (std::size_t j = 0; j < net.input_dim(); ++j) {
        cur.push_back({net.domain.low[j], net.domain.high[j]});
        in_sup.push_back(cur.back().abs_sup());
    }
    sup.push_back(in_sup);
    for (const Layer& layer : net.layers) {
        ActivationSpec spec = spec_for(layer.activation);
        std::vector<Interval> next(layer.out_dim());
        Vec s(layer.out_dim());
        for (std::size_t i = 0; i < layer.out_dim(); ++i) {
            Interval acc{layer.bias[i], layer.bias[i]};
            for (std::size_t j = 0; j < layer.in_dim(); ++j) {
                double w = layer.weights(i, j);
                double a = w * cur[j].lo, b = w * cur[j].hi;
                acc.lo += std::min(a, b);
                acc.hi += std::max(a, b);
            }
            next[i] = {spec.evaluate(acc.lo), spec.evaluate(acc.hi)};
            s[i] = next[i].abs_sup();
        }
        sup.push_back(std::move(s));
        cur = std::move(next);
    }
    return sup;
}

// How a two-for-one slab realizes its weights, decided by the middle
// activation: mirrored pairs (d != 0), a sign split (m+ != m-), or one block.
enum class SlabStyle { single, split, mirrored };

inline SlabStyle slab_style(const ActivationSpec& spec) {
    if (spec.d != 0.0) return SlabStyle::mirrored;
    if (spec.m_plus != spec.m_minus) return SlabStyle::split;
    return SlabStyle::single;
}

// Geometry of one two-for-one slab inside the source.
struct Slab {
    int mid_layer = 0;          // univariate pool layer
    int n_in = 0;               // target inputs (pools 0..n_in-1; pool n_in is the bias pool)
    int m_cap = 0;
    bool mirrored = false;
    int half = 0;               // mirror offset within the middle layer

    Pool pool(int j) const { return {j * m_cap, m_cap}; }
    Pool bias_pool() const { return pool(n_in); }
};

// Approximate one target row (weights wt, bias bt) on the slab's outer layer.
inline void build_slab_row(Builder& b, const Slab& slab, int row, const Vec& wt, double bt,
                           int target_out, double tol_w, double tol_b) {
    int outer = slab.mid_layer + 1;
    const Layer& mid = b.src(slab.mid_layer);
    const Layer& out = b.src(outer);
    ActivationSpec phi0 = spec_for(mid.activation);
    SlabStyle style = slab_style(phi0);
    double ss = phi0.slope_sum();

    auto keep_pair = [&](int col) {
        b.keep_weight(outer, row, col);
        if (slab.mirrored) b.keep_weight(outer, row, col + slab.half);
    };

    auto run_block = [&](BlockRecord rec, const std::vector<Candidate>& cands, bool is_bias,
                         int mid_in_col) {
        if (rec.z == 0.0) {
            rec.achieved = true;
            b.record(std::move(rec));
            return;
        }
        std::vector<int> cols;
        SubsetSolution sol = solve_waves(rec.z, rec.tolerance, cands, b.cfg.m, b.cfg.attempts,
                                         &cols);
        if (!sol.achieved) b.fail(outer, row, rec.target_in, sol);
        rec.residual = sol.residual;
        rec.achieved = true;
        rec.picks = cols;
        for (int col : cols) {
            keep_pair(col);
            if (is_bias) {
                b.keep_bias(slab.mid_layer, col);
                if (slab.mirrored) b.keep_bias(slab.mid_layer, col + slab.half);
            } else {
                b.keep_weight(slab.mid_layer, col, mid_in_col);
                if (slab.mirrored) b.keep_weight(slab.mid_layer, col + slab.half, mid_in_col);
            }
        }
        b.record(std::move(rec));
    };

    for (int j = 0; j < slab.n_in; ++j) {
        Pool pool = slab.pool(j);
        auto base_rec = [&](int branch) {
            BlockRecord rec;
            rec.kind = BlockRecord::Kind::two_weight;
            rec.layer = outer;
            rec.row = row;
            rec.target_out = target_out;
            rec.target_in = j;
            rec.branch = branch;
            rec.mirrored = slab.mirrored;
            rec.z = wt[static_cast<std::size_t>(j)];
            rec.tolerance = tol_w;
            return rec;
        };
        if (style == SlabStyle::split) {
            // I_j split by sign of the first-layer weight; each branch
            // approximates the same target weight
            for (int branch : {+1, -1}) {
                std::vector<Candidate> cands;
                for (int k = 0; k < pool.cap; ++k) {
                    int col = pool.col(k);
                    double w1 = mid.weights(static_cast<std::size_t>(col),
                                            static_cast<std::size_t>(j));
                    if (w1 == 0.0 || (branch > 0) != (w1 > 0.0)) continue;
                    double v = ss * out.weights(static_cast<std::size_t>(row),
                                                static_cast<std::size_t>(col)) * w1;
                    if (v == 0.0) continue;
                    cands.push_back({col, k, v});
                }
                run_block(base_rec(branch), cands, false, j);
            }
        } else {
            // single: phi0(u) ~ m+ u on both sides; mirrored: the pair
            // realizes (m+ + m-) u with the d terms cancelling exactly
            double coef = style == SlabStyle::mirrored ? ss : phi0.m_plus;
            std::vector<Candidate> cands;
            for (int k = 0; k < pool.cap; ++k) {
                int col = pool.col(k);
                double v = coef * out.weights(static_cast<std::size_t>(row),
                                              static_cast<std::size_t>(col)) *
                           mid.weights(static_cast<std::size_t>(col),
                                       static_cast<std::size_t>(j));
                if (v == 0.0) continue;
                cands.push_back({col, k, v});
            }
            run_block(base_rec(0), cands, false, j);
        }
    }

    // bias block: candidates are the exact contributions of bias-pool
    // neurons, so this path carries no linearization error
    Pool bp = slab.bias_pool();
    BlockRecord rec;
    rec.kind = BlockRecord::Kind::two_bias;
    rec.layer = outer;
    rec.row = row;
    rec.target_out = target_out;
    rec.mirrored = slab.mirrored;
    rec.z = bt;
    rec.tolerance = tol_b;
    std::vector<Candidate> cands;
    for (int k = 0; k < bp.cap; ++k) {
        int col = bp.col(k);
        double b1 = mid.bias[static_cast<std::size_t>(col)];
        double v = phi0.evaluate(b1);
        if (slab.mirrored) v -= phi0.evaluate(-b1);
        v *= out.weights(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
        if (v == 0.0) continue;
        cands.push_back({col, k, v});
    }
    run_block(std::move(rec), cands, true, -1);
}

}  // namespace detail

// Classical construction: each target layer becomes two source layers with
// univariate middle neurons. Source depth 2L.
inline Ticket construct_2L(const Network& target, const ConstructConfig& cfg) {
    validate(target);
    detail::Builder b;
    b.target = &target;
    b.cfg = cfg;
    b.budget = error_budget(target, cfg.eps);
    check_budget(b.budget);
    b.comp_sup = detail::component_sups(target);
    int L = static_cast<int>(target.depth());
    int mc = b.m_cap();

    // per-slab init: middle layer U[+-sigma_l] (weights and biases), outer
    // layer U[+-1/(|m+ + m-| sigma_l)]; mirrored rows/cols for d != 0
    InitPlan plan;
    plan.scheme = "composite";
    plan.seed = cfg.seed;
    std::vector<std::size_t> arch{target.input_dim()};
    std::vector<std::string> tags;
    std::vector<bool> slab_mirrored(static_cast<std::size_t>(L));
    std::vector<int> slab_cap(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        const Layer& tl = target.layers[static_cast<std::size_t>(l)];
        ActivationSpec spec = spec_for(tl.activation);
        detail::SlabStyle style = detail::slab_style(spec);
        bool mirrored = style == detail::SlabStyle::mirrored;
        slab_mirrored[static_cast<std::size_t>(l)] = mirrored;
        // sign splits halve each branch's pool, so give split slabs twice the slots
        slab_cap[static_cast<std::size_t>(l)] = mc * (style == detail::SlabStyle::split ? 2 : 1);
        double comp = 1.0;
        for (double s : b.comp_sup[static_cast<std::size_t>(l)]) comp = std::max(comp, s);
        double sigma = 1.0;
        if (!spec.exact_linearization()) {
            double M1 = std::max(1.0, b.budget.M[static_cast<std::size_t>(l)]);
            sigma = sigma_eps2(spec, b.budget.eps_l[static_cast<std::size_t>(l)] / 2.0,
                               tl.in_dim(), std::max(comp, M1), cfg.delta / L, tl.out_dim(),
                               cfg.C)
                        .sigma;
        }
        double outer_hr = 1.0 / (std::abs(spec.slope_sum()) * sigma);
        plan.layers.push_back({sigma, sigma, mirrored, false});
        plan.layers.push_back({outer_hr, 0.0, false, mirrored});
        std::size_t mid_w = static_cast<std::size_t>((static_cast<int>(tl.in_dim()) + 1) *
                                                     slab_cap[static_cast<std::size_t>(l)] *
                                                     (mirrored ? 2 : 1));
        arch.push_back(mid_w);
        arch.push_back(tl.out_dim());
        tags.push_back(tl.activation);
        tags.push_back(tl.activation);
    }
    Network source = realize_source(plan, arch, tags, target.domain);
    b.ticket = make_dense_ticket(source);
    for (auto& ml : b.ticket.masks) {
        std::fill(ml.weights.begin(), ml.weights.end(), 0);
        std::fill(ml.bias.begin(), ml.bias.end(), 0);
    }
    b.ticket.manifest.seed = cfg.seed;
    b.ticket.manifest.mode = "2l";
    b.ticket.manifest.eps = cfg.eps;
    b.ticket.manifest.delta = cfg.delta;
    b.ticket.manifest.pool_m = cfg.m;
    b.ticket.manifest.attempts = cfg.attempts;
    b.ticket.manifest.init_plan = plan;
    b.ticket.manifest.layer_eps = b.budget.eps_l;
    b.ticket.manifest.copy_plan.assign(static_cast<std::size_t>(L), 1);
    b.ticket.manifest.carrier_cols.resize(source.depth());
    b.ticket.manifest.carrier_values.resize(source.depth());

    for (int l = 0; l < L; ++l) {
        const Layer& tl = target.layers[static_cast<std::size_t>(l)];
        detail::Slab slab;
        slab.mid_layer = 2 * l;
        slab.n_in = static_cast<int>(tl.in_dim());
        slab.m_cap = slab_cap[static_cast<std::size_t>(l)];
        slab.mirrored = slab_mirrored[static_cast<std::size_t>(l)];
        slab.half = static_cast<int>(source.layers[static_cast<std::size_t>(slab.mid_layer)]
                                         .out_dim()) /
                    2;
        double eps_l = b.budget.eps_l[static_cast<std::size_t>(l)];
        double M = std::max(1.0, b.budget.M[static_cast<std::size_t>(l)]);
        double tol_w = eps_l / (2.0 * M * (slab.n_in + 1));
        double tol_b = eps_l / (2.0 * (slab.n_in + 1));
        for (std::size_t i = 0; i < tl.out_dim(); ++i) {
            Vec wt(tl.in_dim());
            for (std::size_t j = 0; j < tl.in_dim(); ++j) wt[j] = tl.weights(i, j);
            detail::build_slab_row(b, slab, static_cast<int>(i), wt, tl.bias[i],
                                   static_cast<int>(i), tol_w, tol_b);
        }
    }
    return std::move(b.ticket);
}

namespace detail {

// State for the L+1 pipeline: interior source layer l hosts m*attempts copy
// slots per target-layer-l neuron plus a carrier pool; copies beyond the
// first wave are built lazily when a later block picks them.
struct LPlusOne {
    Builder b;
    Slab slab;  // realizes target layer 1 across source layers 0 and 1
    std::vector<std::vector<std::vector<bool>>> built;  // [target layer][neuron][slot]

    int L = 0;
    int mc = 0;

    Pool copy_pool(int target_layer, int neuron) const {
        // source layer `target_layer`; carrier pool sits after the copies
        (void)target_layer;
        return {neuron * mc, mc};
    }
    Pool carrier_pool(int src_layer) const {
        int n = static_cast<int>(
            b.target->layers[static_cast<std::size_t>(src_layer - 1)].out_dim());
        return {n * mc, mc};
    }

    void ensure_copy(int target_layer, int neuron, int slot);
    void build_one_row(int src_layer, int row, const Vec& wt, double bt, int target_out);
};

inline void LPlusOne::build_one_row(int src_layer, int row, const Vec& wt, double bt,
                                    int target_out) {
    const Layer& layer = b.src(src_layer);
    int n_in = static_cast<int>(wt.size());  // width of target layer src_layer-1
    double eps_l = b.budget.eps_l[static_cast<std::size_t>(src_layer - 1)];
    double M = std::max(1.0, b.budget.M[static_cast<std::size_t>(src_layer - 1)]);
    double T = spec_for(layer.activation).lipschitz;
    double tol = eps_l / (M * T * (n_in + 1));

    for (int j = 0; j < n_in; ++j) {
        BlockRecord rec;
        rec.kind = BlockRecord::Kind::one_weight;
        rec.layer = src_layer;
        rec.row = row;
        rec.target_out = target_out;
        rec.target_in = j;
        rec.z = wt[static_cast<std::size_t>(j)];
        rec.tolerance = tol;
        if (rec.z == 0.0) {
            rec.achieved = true;
            b.record(std::move(rec));
            continue;
        }
        Pool pool = copy_pool(src_layer - 1, j);
        std::vector<Candidate> cands;
        for (int k = 0; k < pool.cap; ++k)
            cands.push_back({pool.col(k), k,
                             layer.weights(static_cast<std::size_t>(row),
                                           static_cast<std::size_t>(pool.col(k)))});
        std::vector<int> cols;
        SubsetSolution sol = solve_waves(rec.z, rec.tolerance, cands, b.cfg.m, b.cfg.attempts,
                                         &cols);
        if (!sol.achieved) b.fail(src_layer, row, j, sol);
        rec.residual = sol.residual;
        rec.achieved = true;
        rec.picks = cols;
        for (int col : cols) {
            b.keep_weight(src_layer, row, col);
            ensure_copy(src_layer - 1, j, col - pool.base);
        }
        b.record(std::move(rec));
    }

    // bias realized over the carrier pool; candidates use the carriers'
    // exact tracked values, so carrier imprecision does not compound
    BlockRecord rec;
    rec.kind = BlockRecord::Kind::one_const;
    rec.layer = src_layer;
    rec.row = row;
    rec.target_out = target_out;
    rec.z = bt;
    rec.tolerance = eps_l / (T * (n_in + 1));
    if (rec.z == 0.0) {
        rec.achieved = true;
        b.record(std::move(rec));
        return;
    }
    const auto& ccols = b.ticket.manifest.carrier_cols[static_cast<std::size_t>(src_layer - 1)];
    const auto& cvals = b.ticket.manifest.carrier_values[static_cast<std::size_t>(src_layer - 1)];
    std::vector<Candidate> cands;
    for (std::size_t k = 0; k < ccols.size(); ++k)
        cands.push_back({ccols[k], static_cast<int>(k),
                         layer.weights(static_cast<std::size_t>(row),
                                       static_cast<std::size_t>(ccols[k])) *
                             cvals[k]});
    std::vector<int> cols;
    SubsetSolution sol = solve_waves(rec.z, rec.tolerance, cands, b.cfg.m, b.cfg.attempts, &cols);
    if (!sol.achieved) b.fail(src_layer, row, -1, sol);
    rec.residual = sol.residual;
    rec.achieved = true;
    rec.picks = cols;
    for (int col : cols) b.keep_weight(src_layer, row, col);
    b.record(std::move(rec));
}

inline void LPlusOne::ensure_copy(int target_layer, int neuron, int slot) {
    auto flag = built[static_cast<std::size_t>(target_layer)][static_cast<std::size_t>(neuron)]
                     [static_cast<std::size_t>(slot)];
    if (flag) return;
    built[static_cast<std::size_t>(target_layer)][static_cast<std::size_t>(neuron)]
         [static_cast<std::size_t>(slot)] = true;
    const Layer& tl = b.target->layers[static_cast<std::size_t>(target_layer - 1)];
    Vec wt(tl.in_dim());
    for (std::size_t j = 0; j < tl.in_dim(); ++j)
        wt[j] = tl.weights(static_cast<std::size_t>(neuron), j);
    double bt = tl.bias[static_cast<std::size_t>(neuron)];
    int row = copy_pool(target_layer, neuron).col(slot);
    if (target_layer == 1) {
        double eps1 = b.budget.eps_l[0];
        double M0 = std::max(1.0, b.budget.M[0]);
        build_slab_row(b, slab, row, wt, bt, neuron, eps1 / (2.0 * M0 * (slab.n_in + 1)),
                       eps1 / (2.0 * (slab.n_in + 1)));
    } else {
        build_one_row(target_layer, row, wt, bt, neuron);
    }
}

}  // namespace detail

// One source layer per target layer plus one helper layer up front: source
// depth L+1. Interior layers host m approximate copies of each target neuron;
// the output layer keeps exactly one row per output.
inline Ticket construct_L_plus_1(const Network& target, const ConstructConfig& cfg) {
    validate(target);
    detail::LPlusOne ctx;
    detail::Builder& b = ctx.b;
    b.target = &target;
    b.cfg = cfg;
    b.budget = error_budget(target, cfg.eps);
    check_budget(b.budget);
    b.comp_sup = detail::component_sups(target);
    ctx.L = static_cast<int>(target.depth());
    ctx.mc = b.m_cap();
    int L = ctx.L, mc = ctx.mc;

    ActivationSpec phi1 = spec_for(target.layers[0].activation);
    detail::SlabStyle style0 = detail::slab_style(phi1);
    bool mirrored = style0 == detail::SlabStyle::mirrored;
    int slab_cap = mc * (style0 == detail::SlabStyle::split ? 2 : 1);
    double comp0 = 1.0;
    for (double s : b.comp_sup[0]) comp0 = std::max(comp0, s);
    double sigma = 1.0;
    if (!phi1.exact_linearization()) {
        double M0 = std::max(1.0, b.budget.M[0]);
        sigma = sigma_eps2(phi1, b.budget.eps_l[0] / 2.0, target.input_dim(),
                           std::max(comp0, M0), cfg.delta / L, target.layers[0].out_dim(), cfg.C)
                    .sigma;
    }

    InitPlan plan;
    plan.scheme = "composite";
    plan.seed = cfg.seed;
    std::vector<std::size_t> arch{target.input_dim()};
    std::vector<std::string> tags;
    std::size_t mid_w = static_cast<std::size_t>((static_cast<int>(target.input_dim()) + 1) *
                                                 slab_cap * (mirrored ? 2 : 1));
    arch.push_back(mid_w);
    plan.layers.push_back({sigma, sigma, mirrored, false});
    tags.push_back(target.layers[0].activation);
    for (int l = 1; l <= L; ++l) {
        const Layer& tl = target.layers[static_cast<std::size_t>(l - 1)];
        std::size_t width = l == L ? target.output_dim()
                                   : static_cast<std::size_t>((static_cast<int>(tl.out_dim()) + 1) *
                                                              mc);
        arch.push_back(width);
        if (l == 1)
            plan.layers.push_back(
                {1.0 / (std::abs(phi1.slope_sum()) * sigma), 0.0, false, mirrored});
        else
            plan.layers.push_back({1.0, 0.0, false, false});
        tags.push_back(tl.activation);
    }
    Network source = realize_source(plan, arch, tags, target.domain);
    b.ticket = make_dense_ticket(source);
    for (auto& ml : b.ticket.masks) {
        std::fill(ml.weights.begin(), ml.weights.end(), 0);
        std::fill(ml.bias.begin(), ml.bias.end(), 0);
    }
    auto& man = b.ticket.manifest;
    man.seed = cfg.seed;
    man.mode = "l+1";
    man.eps = cfg.eps;
    man.delta = cfg.delta;
    man.pool_m = cfg.m;
    man.attempts = cfg.attempts;
    man.init_plan = plan;
    man.layer_eps = b.budget.eps_l;
    for (int l = 1; l <= L; ++l) man.copy_plan.push_back(l == L ? 1 : cfg.m);
    man.carrier_cols.resize(source.depth());
    man.carrier_values.resize(source.depth());

    ctx.slab = {0, static_cast<int>(target.input_dim()), slab_cap, mirrored,
                static_cast<int>(mid_w) / 2};
    ctx.built.resize(static_cast<std::size_t>(L) + 1);
    for (int l = 1; l < L; ++l)
        ctx.built[static_cast<std::size_t>(l)].assign(
            target.layers[static_cast<std::size_t>(l - 1)].out_dim(),
            std::vector<bool>(static_cast<std::size_t>(mc), false));

    // carrier pools on interior layers: constant values available to the
    // bias blocks of the next layer
    for (int l = 1; l < L; ++l) {
        detail::Pool cp = ctx.carrier_pool(l);
        const Layer& layer = b.src(l);
        ActivationSpec phi = spec_for(layer.activation);
        auto& ccols = man.carrier_cols[static_cast<std::size_t>(l)];
        auto& cvals = man.carrier_values[static_cast<std::size_t>(l)];
        if (phi.d != 0.0) {
            // free carriers: nothing kept, each neuron emits phi(0) = d
            for (int k = 0; k < cp.cap; ++k) {
                ccols.push_back(cp.col(k));
                cvals.push_back(phi.d);
            }
            continue;
        }
        // any O(1) value works for a carrier since the exact value is what
        // downstream bias blocks consume, so aim loosely and keep whatever
        // lands; individual rows may fail without hurting the construction
        const double kCarrierZ = 0.5;
        const double kCarrierTol = 0.25;
        for (int k = 0; k < cp.cap; ++k) {
            int row = cp.col(k);
            BlockRecord rec;
            rec.layer = l;
            rec.row = row;
            rec.z = kCarrierZ;
            rec.tolerance = kCarrierTol;
            std::vector<detail::Candidate> cands;
            std::vector<int> cols;
            if (l == 1) {
                rec.kind = BlockRecord::Kind::two_bias;
                rec.mirrored = ctx.slab.mirrored;
                detail::Pool bp = ctx.slab.bias_pool();
                ActivationSpec phi0 = spec_for(b.src(0).activation);
                for (int q = 0; q < bp.cap; ++q) {
                    int col = bp.col(q);
                    double b1 = b.src(0).bias[static_cast<std::size_t>(col)];
                    double v = phi0.evaluate(b1);
                    if (ctx.slab.mirrored) v -= phi0.evaluate(-b1);
                    v *= layer.weights(static_cast<std::size_t>(row),
                                       static_cast<std::size_t>(col));
                    if (v == 0.0) continue;
                    cands.push_back({col, q, v});
                }
            } else {
                rec.kind = BlockRecord::Kind::one_const;
                const auto& pcols = man.carrier_cols[static_cast<std::size_t>(l - 1)];
                const auto& pvals = man.carrier_values[static_cast<std::size_t>(l - 1)];
                for (std::size_t q = 0; q < pcols.size(); ++q) {
                    double v = layer.weights(static_cast<std::size_t>(row),
                                             static_cast<std::size_t>(pcols[q])) *
                               pvals[q];
                    if (v == 0.0) continue;
                    cands.push_back({pcols[q], static_cast<int>(q), v});
                }
            }
            SubsetSolution sol = detail::solve_waves(rec.z, rec.tolerance, cands, cfg.m,
                                                     cfg.attempts, &cols);
            if (!sol.achieved) continue;  // best effort; unreachable rows stay dark
            double pre = 0.0;
            for (std::size_t i = 0; i < cands.size(); ++i)
                if (std::find(cols.begin(), cols.end(), cands[i].col) != cols.end())
                    pre += cands[i].value;
            double value = phi.evaluate(pre);
            if (value == 0.0) continue;  // dead carrier, useless downstream
            rec.residual = sol.residual;
            rec.achieved = true;
            rec.picks = cols;
            for (int col : cols) {
                b.keep_weight(l, row, col);
                if (l == 1) {
                    b.keep_bias(0, col);
                    if (ctx.slab.mirrored) {
                        b.keep_bias(0, col + ctx.slab.half);
                        b.keep_weight(l, row, col + ctx.slab.half);
                    }
                }
            }
            b.record(std::move(rec));
            ccols.push_back(row);
            cvals.push_back(value);
        }
        if (static_cast<int>(ccols.size()) < cfg.m)
            throw BlockFailure("block failure: source layer " + std::to_string(l) +
                               " produced only " + std::to_string(ccols.size()) +
                               " carriers, need " + std::to_string(cfg.m));
    }

    // first-wave copies of every interior neuron, eagerly
    for (int l = 1; l < L; ++l)
        for (std::size_t i = 0; i < target.layers[static_cast<std::size_t>(l - 1)].out_dim(); ++i)
            for (int k = 0; k < cfg.m; ++k) ctx.ensure_copy(l, static_cast<int>(i), k);

    // output layer: one row per target output
    const Layer& tout = target.layers[static_cast<std::size_t>(L - 1)];
    for (std::size_t i = 0; i < tout.out_dim(); ++i) {
        Vec wt(tout.in_dim());
        for (std::size_t j = 0; j < tout.in_dim(); ++j) wt[j] = tout.weights(i, j);
        if (L == 1) {
            double eps1 = b.budget.eps_l[0];
            double M0 = std::max(1.0, b.budget.M[0]);
            detail::build_slab_row(b, ctx.slab, static_cast<int>(i), wt, tout.bias[i],
                                   static_cast<int>(i),
                                   eps1 / (2.0 * M0 * (ctx.slab.n_in + 1)),
                                   eps1 / (2.0 * (ctx.slab.n_in + 1)));
        } else {
            ctx.build_one_row(L, static_cast<int>(i), wt, tout.bias[i], static_cast<int>(i));
        }
    }
    return std::move(b.ticket);
}

inline Ticket construct(const Network& target, const ConstructConfig& cfg,
                        const std::string& mode) {
    if (mode == "l+1") return construct_L_plus_1(target, cfg);
    if (mode == "2l") return construct_2L(target, cfg);
    throw DomainError("construct: mode must be 'l+1' or '2l'");
}

}  // namespace ticketforge
