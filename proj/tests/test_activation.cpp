#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ticketforge/activation.hpp"

using namespace ticketforge;

TEST_CASE("spec_for: relu constants") {
    ActivationSpec s = spec_for("relu");
    REQUIRE(s.m_plus == 1.0);
    REQUIRE(s.m_minus == 0.0);
    REQUIRE(s.d == 0.0);
    REQUIRE(std::isinf(s.radius(0.01)));
    REQUIRE(s.lipschitz == 1.0);
}

TEST_CASE("spec_for: sigmoid constants") {
    ActivationSpec s = spec_for("sigmoid");
    REQUIRE(s.m_plus == 0.25);
    REQUIRE(s.m_minus == 0.25);
    REQUIRE(s.d == 0.5);
    REQUIRE(s.lipschitz == 0.25);
    REQUIRE(s.radius(0.01) == Catch::Approx(std::cbrt(0.48)).epsilon(1e-12));
}

TEST_CASE("spec_for: tanh radius cube-root cap") {
    ActivationSpec s = spec_for("tanh");
    REQUIRE(s.radius(0.003) == Catch::Approx(0.20800838230519041).epsilon(1e-12));
    REQUIRE(s.radius(10.0) == M_PI / 2.0);  // capped
}

TEST_CASE("spec_for: lrelu parses alpha; unknown tags rejected") {
    ActivationSpec s = spec_for("lrelu:0.1");
    REQUIRE(s.m_minus == 0.1);
    REQUIRE(s.evaluate(-2.0) == -0.2);
    REQUIRE_THROWS_AS(spec_for("gelu"), DomainError);
    REQUIRE_THROWS_AS(spec_for("lrelu:"), DomainError);
}

TEST_CASE("identity_residual: exact for relu and lrelu") {
    REQUIRE(identity_residual(spec_for("relu"), 0.7, 0.01) == 0.0);
    REQUIRE(identity_residual(spec_for("lrelu:0.1"), -0.5, 0.01) == 0.0);
}

TEST_CASE("identity_residual: tanh bound at x=0.1") {
    double r = identity_residual(spec_for("tanh"), 0.1, 0.01);
    REQUIRE(r == Catch::Approx(3.32e-4).margin(2e-6));
    REQUIRE(r <= 0.1 * 0.1 * 0.1 / 3.0);  // |tanh(x) - x| <= x^3/3
}

TEST_CASE("identity_residual: radius violation throws") {
    REQUIRE_THROWS_AS(identity_residual(spec_for("tanh"), 1.0, 1e-4), DomainError);
}

TEST_CASE("invert_g: relu unconstrained") {
    REQUIRE_FALSE(invert_g(spec_for("relu"), 0.01).has_value());
}

TEST_CASE("invert_g: tanh closed form oracle") {
    // g(e) = e / (3e)^(1/3) = e^(2/3) / 3^(1/3), so g^{-1}(y) = (y 3^(1/3))^(3/2)
    double e2 = invert_g(spec_for("tanh"), 0.01).value();
    REQUIRE(e2 == Catch::Approx(0.0017320508075688772).epsilon(1e-9));
}

TEST_CASE("invert_g: sigmoid closed form oracle") {
    // g^{-1}(y) = (y 48^(1/3))^(3/2)
    double oracle = std::pow(0.01 * std::cbrt(48.0), 1.5);
    double e2 = invert_g(spec_for("sigmoid"), 0.01).value();
    REQUIRE(oracle == Catch::Approx(0.0069282032302755089).epsilon(1e-12));
    REQUIRE(e2 == Catch::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("invert_g: round trip across y grid") {
    for (const char* tag : {"tanh", "sigmoid"}) {
        ActivationSpec s = spec_for(tag);
        for (double y : {1e-4, 1e-3, 1e-2, 1e-1}) {
            double e2 = invert_g(s, y).value();
            REQUIRE(std::abs(s.g(e2) - y) <= 1e-9);
        }
    }
}

TEST_CASE("grid check: linearization within eps on [-a, a]") {
    for (const char* tag : {"tanh", "sigmoid"}) {
        ActivationSpec s = spec_for(tag);
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            double a = s.radius(eps);
            double worst = 0.0;
            for (int i = 0; i <= 10000; ++i) {
                double x = -a + 2.0 * a * i / 10000;
                worst = std::max(worst, std::abs(s.evaluate(x) - (s.mu(x) * x + s.d)));
            }
            REQUIRE(worst <= eps + 1e-12);
        }
    }
}

TEST_CASE("grid check: Lemma-1 identity bound") {
    for (const char* tag : {"tanh", "sigmoid"}) {
        ActivationSpec s = spec_for(tag);
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            double a = s.radius(eps);
            double bound = 2.0 * eps / s.slope_sum();
            for (int i = 0; i <= 10000; ++i) {
                double x = -a + 2.0 * a * i / 10000;
                REQUIRE(identity_residual(s, x, eps) <= bound + 1e-12);
            }
        }
    }
}

TEST_CASE("register_check: accepts registered specs") {
    for (const char* tag : {"relu", "lrelu:0.2", "tanh", "sigmoid", "linear"})
        REQUIRE_NOTHROW(register_check(spec_for(tag)));
}

TEST_CASE("register_check: refuses shifted relu") {
    ActivationSpec s = spec_for("relu");
    s.tag = "shifted_relu";
    s.evaluate = [](double x) { return x - 1.0 > 0.0 ? x - 1.0 : 0.0; };
    REQUIRE_THROWS_AS(register_check(s), DomainError);
}

TEST_CASE("register_check: refuses absolute value") {
    // |x| has m+ = 1, m- = -1, so m+ + m- = 0
    ActivationSpec s = spec_for("relu");
    s.tag = "abs";
    s.evaluate = [](double x) { return std::abs(x); };
    s.m_plus = 1.0;
    s.m_minus = -1.0;
    REQUIRE_THROWS_AS(register_check(s), DomainError);
}
