#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ticketforge/activation.hpp"
#include "ticketforge/common.hpp"
#include "ticketforge/network.hpp"
#include "ticketforge/rng.hpp"

namespace ticketforge {

struct ErrorBudget {
    double eps = 0.0;
    Vec eps_l;    // per-layer parameter tolerance, 1-based layer l at index l-1
    Vec M;        // M[l] = sup ||x^(l)||_1, index 0 is the input
    Vec W_inf;    // max absolute row sum per layer
    double T = 1.0;
    std::size_t L = 0;
};

enum class NormMode { interval, sampled };

// M_l = sup over the domain of ||x^(l)||_1 and the exact inf-norms of the
// weight matrices. Interval propagation is sound (all registered activations
// are monotone); the sampled estimate carries a 1.05 safety factor and is
// explicitly unsound.
inline std::pair<Vec, Vec> layer_norms(const Network& net, NormMode mode = NormMode::interval,
                                       int samples = 2048, uint64_t seed = 0) {
    Vec W_inf;
    for (const Layer& l : net.layers) W_inf.push_back(l.weights.inf_norm());

    Vec M(net.depth() + 1, 0.0);
    if (mode == NormMode::interval) {
        std::vector<Interval> cur;
        for (std::size_t j = 0; j < net.input_dim(); ++j) {
            cur.push_back({net.domain.low[j], net.domain.high[j]});
            M[0] += cur.back().abs_sup();
        }
        for (std::size_t l = 0; l < net.depth(); ++l) {
            const Layer& layer = net.layers[l];
            ActivationSpec spec = spec_for(layer.activation);
            std::vector<Interval> next(layer.out_dim());
            for (std::size_t i = 0; i < layer.out_dim(); ++i) {
                Interval acc{layer.bias[i], layer.bias[i]};
                for (std::size_t j = 0; j < layer.in_dim(); ++j) {
                    double w = layer.weights(i, j);
                    double a = w * cur[j].lo, b = w * cur[j].hi;
                    acc.lo += std::min(a, b);
                    acc.hi += std::max(a, b);
                }
                next[i] = {spec.evaluate(acc.lo), spec.evaluate(acc.hi)};
                M[l + 1] += next[i].abs_sup();
            }
            cur = std::move(next);
        }
    } else {
        Rng rng(seed, {0x6e6fu});
        Vec x(net.input_dim());
        for (int s = 0; s < samples; ++s) {
            for (std::size_t j = 0; j < x.size(); ++j)
                x[j] = rng.uniform(net.domain.low[j], net.domain.high[j]);
            Vec cur = x;
            M[0] = std::max(M[0], l1_norm(cur));
            for (std::size_t l = 0; l < net.depth(); ++l) {
                const Layer& layer = net.layers[l];
                ActivationSpec spec = spec_for(layer.activation);
                Vec h = layer.weights.matvec(cur);
                for (std::size_t i = 0; i < h.size(); ++i) h[i] = spec.evaluate(h[i] + layer.bias[i]);
                cur = std::move(h);
                M[l + 1] = std::max(M[l + 1], l1_norm(cur));
            }
        }
        for (double& m : M) m *= 1.05;
    }
    return {std::move(M), std::move(W_inf)};
}

// eps_l = eps/(n_l L) * [T^(L-l+1) (1 + M_{l-1}) (1 + eps/L)
//                        prod_{k=l+1}^{L-1} (||W^(k)||_inf + eps/L)]^(-1)
// Empty products are 1. Perturbing every layer-l parameter by at most eps_l
// keeps the output within eps in sup norm.
inline ErrorBudget error_budget(const Network& net, double eps,
                                NormMode mode = NormMode::interval) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("error_budget: eps must be in (0,1)");
    ErrorBudget b;
    b.eps = eps;
    b.L = net.depth();
    auto [M, W_inf] = layer_norms(net, mode);
    b.M = M;
    b.W_inf = W_inf;
    b.T = 0.0;
    for (const Layer& l : net.layers) b.T = std::max(b.T, spec_for(l.activation).lipschitz);

    const double Ld = static_cast<double>(b.L);
    for (std::size_t l = 1; l <= b.L; ++l) {
        double n_l = static_cast<double>(net.layers[l - 1].out_dim());
        double bracket = std::pow(b.T, static_cast<double>(b.L - l + 1)) * (1.0 + M[l - 1]) *
                         (1.0 + eps / Ld);
        for (std::size_t k = l + 1; k + 1 <= b.L; ++k) bracket *= W_inf[k - 1] + eps / Ld;
        b.eps_l.push_back(eps / (n_l * Ld) / bracket);
    }
    return b;
}

// Refuses budgets that would demand subset-sum tolerances below what the
// solvers (and double precision) can meaningfully distinguish.
inline void check_budget(const ErrorBudget& b, double floor = 1e-12) {
    for (std::size_t l = 0; l < b.eps_l.size(); ++l)
        if (b.eps_l[l] < floor)
            throw BudgetUnderflow("budget underflow: eps_" + std::to_string(l + 1) + " = " +
                                  std::to_string(b.eps_l[l]) + " below " + std::to_string(floor));
}

struct SigmaEps2 {
    double sigma = 1.0;
    double eps2 = kInfRadius;  // +inf when the linearization is exact (a = inf)
};

// eps'' = g^{-1}(eps' / (C T_t n0 (M/|m+ + m-|) ln(n0 / min{d'/n_t1, eps'/(T_t M)})))
// sigma = min{1, a(eps'')/M}
inline SigmaEps2 sigma_eps2(const ActivationSpec& spec, double eps_prime, std::size_t n0,
                            double M, double delta_prime, std::size_t n_t1, double C = 1.0) {
    if (!(eps_prime > 0.0 && eps_prime < 1.0) || !(delta_prime > 0.0 && delta_prime < 1.0))
        throw DomainError("sigma_eps2: eps', delta' must be in (0,1)");
    SigmaEps2 out;
    if (spec.exact_linearization()) return out;
    double Tt = spec.lipschitz;
    double n0d = static_cast<double>(n0);
    double cut = std::min(delta_prime / static_cast<double>(n_t1), eps_prime / (Tt * M));
    double lg = std::log(n0d / cut);
    if (!(lg > 0.0)) throw DomainError("sigma_eps2: log term not positive");
    double y = eps_prime / (C * Tt * n0d * (M / std::abs(spec.slope_sum())) * lg);
    auto e2 = invert_g(spec, y);
    out.eps2 = *e2;
    out.sigma = std::min(1.0, spec.radius(out.eps2) / M);
    return out;
}

struct WidthReport {
    std::string mode;  // two_for_one | one_for_one | full_L_plus_1
    std::vector<std::size_t> widths;  // required source width per hosted target layer
    std::size_t rho = 1;
    double C = 1.0;
    double gamma = 0.1;
    double eps = 0.0;
    double delta = 0.0;
};

// rho = ceil(C N_t^(1+gamma) ln(1 / min{min_l eps_l, delta}))
inline std::size_t rho_bound(double C, double gamma, std::size_t N_t, double min_eps,
                             double delta) {
    double v = C * std::pow(static_cast<double>(N_t), 1.0 + gamma) *
               std::log(1.0 / std::min(min_eps, delta));
    return static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
}

inline std::size_t target_param_count(const std::vector<std::size_t>& arch) {
    std::size_t n = 0;
    for (std::size_t l = 1; l < arch.size(); ++l) n += arch[l] * arch[l - 1] + arch[l];
    return n;
}

// Required source widths. two_for_one applies the Thm-1 bound per layer,
// one_for_one the Thm-3 bound (with the n_t numerator), full_L_plus_1 the
// Thm-5 display form with the worst-case rho. M and T default to 1; layer_eps
// defaults to eps everywhere.
inline WidthReport width_bounds(const std::vector<std::size_t>& arch, double eps, double delta,
                                const std::string& mode, double C = 1.0, double gamma = 0.1,
                                double M = 1.0, double T = 1.0, const Vec& layer_eps = {}) {
    if (!(C > 0.0) || !(gamma > 0.0)) throw DomainError("width_bounds: C, gamma must be > 0");
    if (arch.size() < 2) throw ShapeError("width_bounds: arch needs >= 2 entries");
    WidthReport rep;
    rep.mode = mode;
    rep.C = C;
    rep.gamma = gamma;
    rep.eps = eps;
    rep.delta = delta;
    std::size_t L = arch.size() - 1;
    Vec eps_l = layer_eps.empty() ? Vec(L, eps) : layer_eps;
    if (eps_l.size() != L) throw ShapeError("width_bounds: layer_eps size mismatch");
    double min_eps = eps_l[0];
    for (double e : eps_l) min_eps = std::min(min_eps, e);
    rep.rho = rho_bound(C, gamma, target_param_count(arch), min_eps, delta);

    auto ceil_width = [](double v) {
        return static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
    };
    for (std::size_t l = 0; l < L; ++l) {
        double n_in = static_cast<double>(arch[l]);
        double n_out = static_cast<double>(arch[l + 1]);
        double w = 1.0;
        if (mode == "two_for_one") {
            double cut = std::min(eps_l[l] / (T * M), delta / n_out);
            w = C * n_in * std::log(n_in / cut);
        } else if (mode == "one_for_one") {
            double cut = std::min(eps_l[l] / (M * T),
                                  delta / (static_cast<double>(rep.rho) * n_out));
            w = C * n_in * std::log(n_in / cut);
        } else if (mode == "full_L_plus_1") {
            double cut = std::min(eps_l[l], delta / static_cast<double>(rep.rho));
            w = C * n_in * std::log(1.0 / cut);
        } else {
            throw DomainError("width_bounds: unknown mode '" + mode + "'");
        }
        rep.widths.push_back(ceil_width(w));
    }
    return rep;
}

}  // namespace ticketforge
