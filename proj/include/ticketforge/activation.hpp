#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "ticketforge/common.hpp"

namespace ticketforge {

inline constexpr double kInfRadius = std::numeric_limits<double>::infinity();

// An activation together with the constants of its piecewise-linear
// approximation near 0: phi(x) ~ m_plus*x + d for x >= 0, m_minus*x + d for
// x < 0, valid on [-a(eps), a(eps)] with error at most eps.
struct ActivationSpec {
    std::string tag;
    std::function<double(double)> evaluate;
    double lipschitz = 1.0;
    double m_plus = 0.0;
    double m_minus = 0.0;
    double d = 0.0;
    // validity radius; returns +inf when the linearization is exact everywhere
    std::function<double(double)> radius;

    double slope_sum() const { return m_plus + m_minus; }
    double phi0() const { return evaluate(0.0); }
    bool exact_linearization() const { return std::isinf(radius(1.0)); }

    double mu(double x) const { return x >= 0.0 ? m_plus : m_minus; }

    // g(x) = x / a(x); identically 0 for exact (a = inf) activations.
    double g(double x) const {
        double a = radius(x);
        return std::isinf(a) ? 0.0 : x / a;
    }
};

// |x - (phi(x) - phi(-x)) / (m_plus + m_minus)|, the identity-representation
// residual. Bounded by 2*eps / (m_plus + m_minus) for |x| <= a(eps).
inline double identity_residual(const ActivationSpec& spec, double x, double eps2) {
    double a = spec.radius(eps2);
    if (std::abs(x) > a)
        throw DomainError("identity_residual: |x| exceeds validity radius a(eps)");
    double rep = (spec.evaluate(x) - spec.evaluate(-x)) / spec.slope_sum();
    return std::abs(x - rep);
}

// Numeric inverse of g on its increasing branch. Returns nullopt for
// activations whose linearization is exact (g == 0, no radius constraint).
inline std::optional<double> invert_g(const ActivationSpec& spec, double y,
                                      double tol = 1e-12) {
    if (spec.exact_linearization()) return std::nullopt;
    if (!(y > 0.0)) throw DomainError("invert_g: y must be positive");
    double lo = 0.0, hi = 1e-12;
    while (spec.g(hi) < y) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw DomainError("invert_g: y outside range of g");
    }
    for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (std::abs(spec.g(mid) - y) <= tol) return mid;
        (spec.g(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

inline bool parse_lrelu_alpha(const std::string& tag, double* alpha) {
    if (tag.rfind("lrelu:", 0) != 0) return false;
    try {
        std::size_t pos = 0;
        std::string arg = tag.substr(6);
        *alpha = std::stod(arg, &pos);
        return pos == arg.size() && *alpha > 0.0;
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace detail

// Checks the approximation property of a candidate spec on a dense grid:
// |phi(x) - mu(x)*x - d| <= eps on [-a(eps), a(eps)] for a range of eps.
// Used both as a test oracle and to refuse unregistrable activations
// (shifted ReLU, |x|) that admit no valid (m_plus, m_minus, d).
inline bool linearization_holds(const ActivationSpec& spec,
                                std::initializer_list<double> eps_grid = {1e-1, 1e-2, 1e-3},
                                int points = 10000) {
    if (spec.slope_sum() == 0.0) return false;
    for (double eps : eps_grid) {
        double a = spec.radius(eps);
        if (!(a > 0.0)) return false;
        double span = std::isinf(a) ? 4.0 : a;
        for (int i = 0; i <= points; ++i) {
            double x = -span + 2.0 * span * i / points;
            double err = std::abs(spec.evaluate(x) - (spec.mu(x) * x + spec.d));
            if (err > eps + 1e-12) return false;
        }
    }
    return true;
}

// Registered activation tags: relu | lrelu:<alpha> | tanh | sigmoid | linear.
inline ActivationSpec spec_for(const std::string& tag) {
    if (tag == "relu") {
        return {tag, [](double x) { return x > 0.0 ? x : 0.0; },
                1.0, 1.0, 0.0, 0.0, [](double) { return kInfRadius; }};
    }
    if (tag == "linear") {
        return {tag, [](double x) { return x; },
                1.0, 1.0, 1.0, 0.0, [](double) { return kInfRadius; }};
    }
    if (tag == "tanh") {
        // |tanh(x) - x| <= x^3/3 on |x| < pi/2, so a = min{(3 eps)^(1/3), pi/2}
        return {tag, [](double x) { return std::tanh(x); },
                1.0, 1.0, 1.0, 0.0,
                [](double eps) { return std::min(std::cbrt(3.0 * eps), M_PI / 2.0); }};
    }
    if (tag == "sigmoid") {
        // sigma(x) = (tanh(x/2) + 1)/2, so a = min{(48 eps)^(1/3), pi}
        return {tag, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
                0.25, 0.25, 0.25, 0.5,
                [](double eps) { return std::min(std::cbrt(48.0 * eps), M_PI); }};
    }
    double alpha = 0.0;
    if (detail::parse_lrelu_alpha(tag, &alpha)) {
        return {tag, [alpha](double x) { return x > 0.0 ? x : alpha * x; },
                1.0, 1.0, alpha, 0.0, [](double) { return kInfRadius; }};
    }
    throw DomainError("unknown activation tag: " + tag);
}

inline bool is_registered_activation(const std::string& tag) {
    try {
        spec_for(tag);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

// Gate for user-proposed specs; throws unless the grid check passes and,
// for finite radii, g(x) = x/a(x) actually vanishes at 0. The latter is what
// rules out fits like a near-zero-slope line under a shifted ReLU.
inline void register_check(const ActivationSpec& spec) {
    if (spec.slope_sum() == 0.0)
        throw DomainError("activation '" + spec.tag + "': m_plus + m_minus must be nonzero");
    if (!linearization_holds(spec))
        throw DomainError("activation '" + spec.tag +
                          "': no valid piecewise-linear approximation near 0");
    if (!spec.exact_linearization()) {
        double g_small = spec.g(1e-12);
        double g_ref = spec.g(1e-3);
        if (!(g_ref > 0.0) || g_small > 0.5 * g_ref)
            throw DomainError("activation '" + spec.tag + "': g(x) = x/a(x) does not vanish at 0");
        for (double x = 1e-9; x < 1e-3; x *= 10.0) {
            if (spec.g(x) > spec.g(x * 10.0) + 1e-15)
                throw DomainError("activation '" + spec.tag + "': g(x) is not monotone near 0");
        }
    }
}

}  // namespace ticketforge
