#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ticketforge/activation.hpp"
#include "ticketforge/common.hpp"
#include "ticketforge/linalg.hpp"

namespace ticketforge {

enum class Role { target, source };

struct Layer {
    Matrix weights;  // n_l x n_{l-1}
    Vec bias;        // n_l
    std::string activation;

    std::size_t out_dim() const { return weights.rows(); }
    std::size_t in_dim() const { return weights.cols(); }
};

// Dense layered feed-forward model on an axis-aligned box domain.
struct Network {
    std::vector<Layer> layers;
    Box domain;
    Role role = Role::target;

    std::size_t depth() const { return layers.size(); }
    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }

    std::vector<std::size_t> arch() const {
        std::vector<std::size_t> a;
        if (layers.empty()) return a;
        a.push_back(layers.front().in_dim());
        for (const Layer& l : layers) a.push_back(l.out_dim());
        return a;
    }
};

inline void validate(const Network& net) {
    if (net.layers.empty()) throw ShapeError("network must have depth >= 1");
    std::size_t prev = net.layers.front().in_dim();
    if (prev < 1) throw ShapeError("all widths must be >= 1");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        if (layer.out_dim() < 1) throw ShapeError("all widths must be >= 1");
        if (layer.in_dim() != prev)
            throw ShapeError("layer " + std::to_string(l) + ": expected " +
                             std::to_string(prev) + " inputs, got " +
                             std::to_string(layer.in_dim()));
        if (layer.bias.size() != layer.out_dim())
            throw ShapeError("layer " + std::to_string(l) + ": bias/weight dimension mismatch");
        if (!is_registered_activation(layer.activation))
            throw DomainError("layer " + std::to_string(l) + ": unknown activation '" +
                              layer.activation + "'");
        for (double w : layer.weights.data())
            if (!std::isfinite(w)) throw DomainError("non-finite weight");
        for (double b : layer.bias)
            if (!std::isfinite(b)) throw DomainError("non-finite bias");
        if (net.role == Role::target) {
            for (double w : layer.weights.data())
                if (std::abs(w) > 1.0 + 1e-12)
                    throw DomainError("target parameter exceeds |theta| <= 1");
            for (double b : layer.bias)
                if (std::abs(b) > 1.0 + 1e-12)
                    throw DomainError("target parameter exceeds |theta| <= 1");
        }
        prev = layer.out_dim();
    }
    if (net.domain.dim() != net.input_dim() || net.domain.high.size() != net.input_dim())
        throw ShapeError("domain box dimension does not match input width");
}

inline Vec forward(const Network& net, const Vec& x) {
    if (x.size() != net.input_dim())
        throw ShapeError("forward: input of size " + std::to_string(x.size()) +
                         " for network with input width " + std::to_string(net.input_dim()));
    Vec cur = x;
    for (const Layer& layer : net.layers) {
        Vec h = layer.weights.matvec(cur);
        ActivationSpec spec = spec_for(layer.activation);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = spec.evaluate(h[i] + layer.bias[i]);
        cur = std::move(h);
    }
    return cur;
}

inline std::size_t nonzero_count(const Network& net) {
    std::size_t n = 0;
    for (const Layer& layer : net.layers) {
        for (double w : layer.weights.data()) n += (w != 0.0);
        for (double b : layer.bias) n += (b != 0.0);
    }
    return n;
}

}  // namespace ticketforge
