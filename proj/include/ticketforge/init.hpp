#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ticketforge/activation.hpp"
#include "ticketforge/common.hpp"
#include "ticketforge/network.hpp"
#include "ticketforge/rng.hpp"
#include "ticketforge/ticket.hpp"

namespace ticketforge {

namespace detail {

inline constexpr uint64_t kWeightTag = 0x77u;  // 'w'
inline constexpr uint64_t kBiasTag = 0x62u;    // 'b'

}  // namespace detail

// Every parameter is a pure function of (seed, layer, row, col), so a source
// network is fully regenerable from its InitPlan. Mirrored layers sample one
// base block M and tile it as [[M, -M], [-M, M]] (rows and/or cols), with
// mirrored biases negated.
inline double source_weight(const InitPlan& plan, std::size_t l, std::size_t i, std::size_t j,
                            std::size_t out_dim, std::size_t in_dim) {
    const InitLayerPlan& p = plan.layers[l];
    std::size_t br = p.rows_mirrored ? out_dim / 2 : out_dim;
    std::size_t bc = p.cols_mirrored ? in_dim / 2 : in_dim;
    double sign = 1.0;
    std::size_t ib = i, jb = j;
    if (p.rows_mirrored && i >= br) {
        ib = i - br;
        sign = -sign;
    }
    if (p.cols_mirrored && j >= bc) {
        jb = j - bc;
        sign = -sign;
    }
    return sign * uniform_at(plan.seed, {detail::kWeightTag, l, ib, jb}, p.weight_half_range);
}

inline double source_bias(const InitPlan& plan, std::size_t l, std::size_t i, std::size_t out_dim) {
    const InitLayerPlan& p = plan.layers[l];
    if (p.bias_half_range == 0.0) return 0.0;
    std::size_t br = p.rows_mirrored ? out_dim / 2 : out_dim;
    double sign = 1.0;
    std::size_t ib = i;
    if (p.rows_mirrored && i >= br) {
        ib = i - br;
        sign = -1.0;
    }
    return sign * uniform_at(plan.seed, {detail::kBiasTag, l, ib}, p.bias_half_range);
}

// Materialize the source network described by a plan.
inline Network realize_source(const InitPlan& plan, const std::vector<std::size_t>& arch,
                              const std::vector<std::string>& activations, const Box& domain) {
    if (arch.size() < 2) throw ShapeError("realize_source: arch needs >= 2 entries");
    std::size_t depth = arch.size() - 1;
    if (plan.layers.size() != depth || activations.size() != depth)
        throw ShapeError("realize_source: plan/activation count does not match arch depth");
    Network net;
    net.role = Role::source;
    net.domain = domain;
    for (std::size_t l = 0; l < depth; ++l) {
        const InitLayerPlan& p = plan.layers[l];
        std::size_t out = arch[l + 1], in = arch[l];
        if ((p.rows_mirrored && out % 2 != 0) || (p.cols_mirrored && in % 2 != 0))
            throw ShapeError("realize_source: mirrored layer " + std::to_string(l) +
                             " needs even width");
        Layer layer;
        layer.activation = activations[l];
        layer.weights = Matrix(out, in);
        layer.bias.assign(out, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
            for (std::size_t j = 0; j < in; ++j)
                layer.weights(i, j) = source_weight(plan, l, i, j, out, in);
            layer.bias[i] = source_bias(plan, l, i, out);
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

// w, b^(1) ~ U[-1,1]; b^(l) = 0 for l > 1.
inline InitPlan convenient_plan(std::size_t depth, uint64_t seed) {
    InitPlan plan;
    plan.scheme = "convenient";
    plan.seed = seed;
    for (std::size_t l = 0; l < depth; ++l)
        plan.layers.push_back({1.0, l == 0 ? 1.0 : 0.0, false, false});
    return plan;
}

inline Network init_convenient(const std::vector<std::size_t>& arch, const std::string& activation,
                               uint64_t seed) {
    std::size_t depth = arch.size() - 1;
    return realize_source(convenient_plan(depth, seed), arch,
                          std::vector<std::string>(depth, activation), Box::unit(arch[0]));
}

// [[M, -M], [-M, M]] tiling on every layer; needs even widths throughout.
inline InitPlan looks_linear_plan(std::size_t depth, uint64_t seed) {
    InitPlan plan;
    plan.scheme = "looks_linear";
    plan.seed = seed;
    for (std::size_t l = 0; l < depth; ++l)
        plan.layers.push_back({1.0, l == 0 ? 1.0 : 0.0, true, true});
    return plan;
}

inline Network init_looks_linear(const std::vector<std::size_t>& arch,
                                 const std::string& activation, uint64_t seed) {
    std::size_t depth = arch.size() - 1;
    return realize_source(looks_linear_plan(depth, seed), arch,
                          std::vector<std::string>(depth, activation), Box::unit(arch[0]));
}

// Two-layer slab: layer-1 params U[-sigma, sigma], layer-2 weights
// U[+-1/(|m_plus + m_minus| sigma)], layer-2 biases zero. Keeps the product
// variable |m_plus + m_minus| w2 w1 in [-1,1]*[-1,1] regardless of sigma.
inline InitPlan thm1_scaled_plan(const ActivationSpec& spec, double sigma, uint64_t seed) {
    if (!(sigma > 0.0 && sigma <= 1.0)) throw DomainError("thm1_scaled: sigma must be in (0,1]");
    double s = std::abs(spec.slope_sum());
    if (s == 0.0) throw DomainError("thm1_scaled: m_plus + m_minus must be nonzero");
    InitPlan plan;
    plan.scheme = "thm1_scaled";
    plan.seed = seed;
    plan.layers.push_back({sigma, sigma, false, false});
    plan.layers.push_back({1.0 / (s * sigma), 0.0, false, false});
    return plan;
}

inline Network init_thm1_scaled(const std::vector<std::size_t>& arch, const ActivationSpec& spec,
                                double sigma, uint64_t seed) {
    if (arch.size() != 3) throw ShapeError("init_thm1_scaled: expects a two-layer arch");
    return realize_source(thm1_scaled_plan(spec, sigma, seed), arch, {spec.tag, spec.tag},
                          Box::unit(arch[0]));
}

inline bool is_homogeneous(const std::string& tag) {
    double alpha;
    return tag == "relu" || tag == "linear" || detail::parse_lrelu_alpha(tag, &alpha);
}

// Bridge from a realistically scaled net (per-layer scale sigma_l) to the
// convenient range: W'^l = W^l / sigma_l, b'^l = b^l / prod_{k<=l} sigma_k,
// with lambda_l = 1/sigma_l returned for the ticket. For homogeneous
// activations, forward(original) = prod_l sigma_l * forward(rescaled).
inline std::pair<Network, Vec> rescale_to_convenient(const Network& net, const Vec& sigmas) {
    if (sigmas.size() != net.depth())
        throw ShapeError("rescale_to_convenient: one sigma per layer required");
    for (const Layer& l : net.layers)
        if (!is_homogeneous(l.activation))
            throw DomainError("rescale_to_convenient: exact only for homogeneous activations, got '" +
                              l.activation + "'");
    Network out = net;
    Vec lambdas(net.depth());
    double prefix = 1.0;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        if (!(sigmas[l] > 0.0)) throw DomainError("rescale_to_convenient: sigma_l must be > 0");
        prefix *= sigmas[l];
        lambdas[l] = 1.0 / sigmas[l];
        for (double& w : out.layers[l].weights.data()) w /= sigmas[l];
        for (double& b : out.layers[l].bias) b /= prefix;
    }
    return {std::move(out), std::move(lambdas)};
}

}  // namespace ticketforge
