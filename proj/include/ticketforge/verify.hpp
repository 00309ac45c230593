#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ticketforge/common.hpp"
#include "ticketforge/construct.hpp"
#include "ticketforge/init.hpp"
#include "ticketforge/network.hpp"
#include "ticketforge/sample.hpp"
#include "ticketforge/ticket.hpp"

namespace ticketforge {

struct VerificationReport {
    double sup_error = 0.0;
    std::size_t samples = 0;
    Vec layer_worst_residual;  // per source layer, over achieved blocks
    TicketStats stats;
    std::size_t attempted = 0;
    std::size_t achieved = 0;
    std::size_t failed = 0;
    uint64_t seed = 0;
    std::vector<std::string> flags;  // audit mismatches, empty when clean
};

// Sampled sup-norm error: max over quasi-random domain points (plus box
// corners) of ||f_t(x) - f_ticket(x)||_1. A lower bound of the true sup.
inline double sup_error(const Network& target, const Ticket& ticket, std::size_t n_samples,
                        uint64_t seed) {
    Network eff = effective_network(ticket);
    if (eff.input_dim() != target.input_dim() || eff.output_dim() != target.output_dim())
        throw ShapeError("sup_error: target and ticket dimensions differ");
    double worst = 0.0;
    for (const Vec& x : domain_samples(target.domain, n_samples, seed)) {
        Vec a = forward(target, x);
        Vec b = forward(eff, x);
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
        worst = std::max(worst, d);
    }
    return worst;
}

namespace detail {

inline double carrier_value_for(const ConstructionManifest& man, std::size_t layer, int col) {
    const auto& cols = man.carrier_cols[layer];
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == col) return man.carrier_values[layer][i];
    throw DomainError("audit: pick " + std::to_string(col) + " is not a carrier of layer " +
                      std::to_string(layer));
}

}  // namespace detail

// Recompute every block residual from the stored picks and regenerated
// source values; confirm kept parameters equal their sampled values exactly
// and mirrored blocks cancel their second-layer weights to exactly zero.
inline VerificationReport audit(const Ticket& t) {
    validate_masks(t);
    const ConstructionManifest& man = t.manifest;
    VerificationReport rep;
    rep.seed = man.seed;
    rep.stats = ticket_stats(t);
    rep.layer_worst_residual.assign(t.depth(), 0.0);

    std::vector<std::string> tags;
    for (const Layer& l : t.source.layers) tags.push_back(l.activation);
    Network regen = realize_source(man.init_plan, t.source.arch(), tags, t.source.domain);
    for (std::size_t l = 0; l < t.depth(); ++l) {
        const Layer& a = t.source.layers[l];
        const Layer& b = regen.layers[l];
        for (std::size_t k = 0; k < a.weights.data().size(); ++k)
            if (t.masks[l].weights[k] && a.weights.data()[k] != b.weights.data()[k])
                rep.flags.push_back("layer " + std::to_string(l) + ": kept weight " +
                                    std::to_string(k) + " differs from its sampled value");
        for (std::size_t i = 0; i < a.bias.size(); ++i)
            if (t.masks[l].bias[i] && a.bias[i] != b.bias[i])
                rep.flags.push_back("layer " + std::to_string(l) + ": kept bias " +
                                    std::to_string(i) + " differs from its sampled value");
    }

    for (std::size_t bi = 0; bi < man.blocks.size(); ++bi) {
        const BlockRecord& rec = man.blocks[bi];
        ++rep.attempted;
        (rec.achieved ? rep.achieved : rep.failed)++;
        auto bad = [&](const std::string& what) {
            rep.flags.push_back("block " + std::to_string(bi) + ": " + what);
        };
        if (rec.layer < 1 || static_cast<std::size_t>(rec.layer) >= t.depth() + 1) {
            bad("source layer out of range");
            continue;
        }
        const Layer& sel = regen.layers[static_cast<std::size_t>(rec.layer)];
        const Layer& prev = regen.layers[static_cast<std::size_t>(rec.layer - 1)];
        ActivationSpec phi0 = spec_for(prev.activation);
        int half = static_cast<int>(prev.out_dim()) / 2;

        double sum = 0.0;
        bool ok = true;
        double mirror_w2 = 0.0;
        for (int col : rec.picks) {
            if (col < 0 || static_cast<std::size_t>(col) >= sel.in_dim()) {
                bad("pick out of range");
                ok = false;
                break;
            }
            std::size_t r = static_cast<std::size_t>(rec.row);
            std::size_t c = static_cast<std::size_t>(col);
            double x = 0.0;
            switch (rec.kind) {
                case BlockRecord::Kind::two_weight: {
                    double coef = (rec.mirrored || rec.branch != 0) ? phi0.slope_sum()
                                                                    : phi0.m_plus;
                    x = coef * sel.weights(r, c) *
                        prev.weights(c, static_cast<std::size_t>(rec.target_in));
                    break;
                }
                case BlockRecord::Kind::two_bias: {
                    double v = phi0.evaluate(prev.bias[c]);
                    if (rec.mirrored) v -= phi0.evaluate(-prev.bias[c]);
                    x = sel.weights(r, c) * v;
                    break;
                }
                case BlockRecord::Kind::one_weight:
                    x = sel.weights(r, c);
                    break;
                case BlockRecord::Kind::one_const:
                    x = sel.weights(r, c) *
                        detail::carrier_value_for(man, static_cast<std::size_t>(rec.layer - 1),
                                                  col);
                    break;
            }
            sum += x;
            if (rec.mirrored)
                mirror_w2 += sel.weights(r, c) + sel.weights(r, c + static_cast<std::size_t>(half));
        }
        if (!ok) continue;
        double residual = std::abs(rec.z - sum);
        if (std::abs(residual - rec.residual) > 1e-12)
            bad("recomputed residual " + std::to_string(residual) + " != recorded " +
                std::to_string(rec.residual));
        if (rec.achieved && rec.residual > rec.tolerance)
            bad("achieved block exceeds its tolerance");
        if (rec.mirrored && mirror_w2 != 0.0) bad("mirrored block does not cancel exactly");
        auto& worst = rep.layer_worst_residual[static_cast<std::size_t>(rec.layer)];
        if (rec.achieved) worst = std::max(worst, rec.residual);
    }
    return rep;
}

struct ModeResult {
    std::string mode;
    double error = 0.0;
    std::size_t params = 0;
    std::size_t max_width = 0;
    std::size_t depth = 0;
    double wall_ms = 0.0;
};

// Build the same target both ways and measure; the sup error uses the seed
// stream (cfg.seed, sample tag) with n_samples points.
inline std::vector<ModeResult> compare_modes(const Network& target, const ConstructConfig& cfg,
                                             std::size_t n_samples = 2000) {
    std::vector<ModeResult> out;
    for (const std::string& mode : {std::string("l+1"), std::string("2l")}) {
        auto t0 = std::chrono::steady_clock::now();
        Ticket t = construct(target, cfg, mode);
        auto t1 = std::chrono::steady_clock::now();
        TicketStats st = ticket_stats(t);
        ModeResult r;
        r.mode = mode;
        r.error = sup_error(target, t, n_samples, cfg.seed);
        r.params = st.param_count;
        r.max_width = st.max_width;
        r.depth = st.depth;
        r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace ticketforge
