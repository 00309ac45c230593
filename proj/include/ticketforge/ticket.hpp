#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ticketforge/common.hpp"
#include "ticketforge/network.hpp"

namespace ticketforge {

struct MaskLayer {
    std::vector<uint8_t> weights;  // row-major, 0/1
    std::vector<uint8_t> bias;
};

// One solved subset-sum block. `picks` are source column indices; together
// with `kind` and the layer coordinates they are enough to recompute the
// residual from regenerated source values during an audit.
struct BlockRecord {
    // Candidate kinds, deciding how X_k is rebuilt from source values
    // (phi0 is the activation of layer-1, the slab's middle layer):
    //   two_weight   X_k = coef * w2[row][k] * w1[k][target_in]
    //                 coef = m_plus + m_minus when split or mirrored, m_plus otherwise
    //   two_bias     X_k = w2[row][k] * (phi0(b1[k]) - [mirrored] phi0(-b1[k]))
    //   one_weight   X_k = w[row][k]
    //   one_const    X_k = w[row][k] * c_k   (c_k = tracked carrier value of column k)
    enum class Kind : uint8_t { two_weight, two_bias, one_weight, one_const };

    Kind kind = Kind::one_weight;
    int layer = 0;          // source layer index (0-based) of the selecting weights
    int row = 0;            // source row (the output copy being built)
    int target_out = -1;    // target neuron i, -1 for carrier blocks
    int target_in = -1;     // target input j, -1 for bias/carrier blocks
    int copy = 0;           // which copy of the target neuron
    // sign branch for split blocks: +1 / -1, 0 when not split
    int branch = 0;
    double z = 0.0;
    double tolerance = 0.0;
    double residual = 0.0;
    bool achieved = false;
    bool mirrored = false;  // picks imply the mirror partner with negated weights
    std::vector<int> picks;
};

struct InitLayerPlan {
    double weight_half_range = 1.0;
    double bias_half_range = 0.0;
    bool rows_mirrored = false;
    bool cols_mirrored = false;
};

struct InitPlan {
    std::string scheme;  // convenient | looks_linear | thm1_scaled | composite
    uint64_t seed = 0;
    std::vector<InitLayerPlan> layers;
};

struct ConstructionManifest {
    uint64_t seed = 0;
    std::string mode;  // "l+1" | "2l"
    double eps = 0.0;
    double delta = 0.0;
    int pool_m = 0;
    int attempts = 0;
    InitPlan init_plan;
    std::vector<int> copy_plan;          // copies per target neuron, per target layer
    std::vector<double> layer_eps;       // per-layer parameter tolerances used
    std::vector<BlockRecord> blocks;
    // carrier bookkeeping per source layer: column indices and their constant
    // values (recomputable; stored for reporting)
    std::vector<std::vector<int>> carrier_cols;
    std::vector<std::vector<double>> carrier_values;
};

// A source network plus a keep/remove mask; evaluation never alters the
// sampled parameter values, it only multiplies by mask and the layer scale.
struct Ticket {
    Network source;
    std::vector<MaskLayer> masks;
    Vec scales;  // lambda_l, default 1
    ConstructionManifest manifest;

    std::size_t depth() const { return source.depth(); }
};

inline Ticket make_dense_ticket(const Network& source) {
    Ticket t;
    t.source = source;
    t.scales.assign(source.depth(), 1.0);
    for (const Layer& l : source.layers) {
        MaskLayer m;
        m.weights.assign(l.weights.rows() * l.weights.cols(), 1);
        m.bias.assign(l.bias.size(), 1);
        t.masks.push_back(std::move(m));
    }
    return t;
}

inline void validate_masks(const Ticket& t) {
    if (t.masks.size() != t.source.depth() || t.scales.size() != t.source.depth())
        throw ShapeError("ticket: mask/scale count does not match source depth");
    for (std::size_t l = 0; l < t.masks.size(); ++l) {
        const Layer& layer = t.source.layers[l];
        if (t.masks[l].weights.size() != layer.weights.rows() * layer.weights.cols() ||
            t.masks[l].bias.size() != layer.bias.size())
            throw ShapeError("ticket: mask shape mismatch at layer " + std::to_string(l));
    }
}

// The network the ticket computes: lambda_l * theta * mask, values unchanged.
inline Network effective_network(const Ticket& t) {
    validate_masks(t);
    Network net = t.source;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        double lam = t.scales[l];
        auto& w = layer.weights.data();
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = lam * w[k] * t.masks[l].weights[k];
        for (std::size_t i = 0; i < layer.bias.size(); ++i)
            layer.bias[i] = lam * layer.bias[i] * t.masks[l].bias[i];
    }
    return net;
}

inline Vec forward_ticket(const Ticket& t, const Vec& x) {
    return forward(effective_network(t), x);
}

struct TicketStats {
    std::size_t param_count = 0;  // mask-kept weights and biases
    std::size_t max_width = 0;    // neurons with >= 1 kept incident parameter
    std::size_t depth = 0;
};

inline TicketStats ticket_stats(const Ticket& t) {
    validate_masks(t);
    TicketStats s;
    s.depth = t.source.depth();
    for (const MaskLayer& m : t.masks) {
        for (uint8_t v : m.weights) s.param_count += v;
        for (uint8_t v : m.bias) s.param_count += v;
    }
    // neuron activity per layer 0..L: incoming row, own bias, or outgoing column
    std::size_t nlayers = t.source.depth();
    for (std::size_t pos = 0; pos <= nlayers; ++pos) {
        std::size_t width = pos == 0 ? t.source.input_dim() : t.source.layers[pos - 1].out_dim();
        std::size_t active = 0;
        for (std::size_t i = 0; i < width; ++i) {
            bool keep = false;
            if (pos > 0) {
                const Layer& in = t.source.layers[pos - 1];
                std::size_t cols = in.weights.cols();
                for (std::size_t j = 0; j < cols && !keep; ++j)
                    keep = t.masks[pos - 1].weights[i * cols + j] != 0;
                keep = keep || t.masks[pos - 1].bias[i] != 0;
            }
            if (!keep && pos < nlayers) {
                const Layer& out = t.source.layers[pos];
                std::size_t cols = out.weights.cols();
                for (std::size_t r = 0; r < out.weights.rows() && !keep; ++r)
                    keep = t.masks[pos].weights[r * cols + i] != 0;
            }
            active += keep;
        }
        if (active > s.max_width) s.max_width = active;
    }
    return s;
}

}  // namespace ticketforge
