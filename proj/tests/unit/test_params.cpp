#include "doctest.h"
#include "rbflow/errors.hpp"
#include "rbflow/params.hpp"

using namespace rbflow;

TEST_CASE("sigma values") {
    CHECK(derive_sigma(0.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(derive_sigma(0.25, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(derive_sigma(0.0, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(derive_sigma(1.0 / 3.0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(derive_sigma(0.1, 2) == doctest::Approx(0.6 / 1.4).epsilon(1e-12)); // (1-0.4)/(2-0.4-0.2)
}

TEST_CASE("sigma pole at (m+1) rho = 1") {
    CHECK_THROWS_AS(derive_sigma(0.5, 1), PoleError);
    CHECK_THROWS_AS(derive_sigma(1.0 / 3.0, 2), PoleError);
    CHECK_THROWS_AS(FlowParams::make(0.25, 3, 2, 0.0), PoleError);
    CHECK_NOTHROW(derive_sigma(0.5 + 1e-9, 1));
}

TEST_CASE("regimes") {
    CHECK(regime_of(-1.0) == Regime::Superlinear);
    CHECK(regime_of(0.0) == Regime::Linear);
    CHECK(regime_of(0.25) == Regime::Sublinear);
    CHECK(regime_of(0.5) == Regime::ConstantSource);
    CHECK(regime_of(1.0) == Regime::Singular);
    CHECK(to_string(Regime::ConstantSource) == "ConstantSource");
}

TEST_CASE("unified coefficients") {
    SUBCASE("Ricci flow, flat fiber: plain heat equation") {
        const auto p = FlowParams::make(0.0, 2, 1, 0.0);
        const auto c = unified_coefficients(p, Eigen::VectorXd::Zero(4));
        CHECK(c.a == 0.0);
        CHECK(c.b.cwiseAbs().maxCoeff() == 0.0);
        CHECK(c.c == 0.0);
        CHECK(c.alpha == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("rho = 1/3, m = 1 on S_g = -2") {
        const auto p = FlowParams::make(1.0 / 3.0, 1, 2, 0.0);
        const auto c = unified_coefficients(p, Eigen::VectorXd::Constant(3, -2.0));
        CHECK(c.a == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
        for (int i = 0; i < 3; ++i) CHECK(c.b[i] == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
        CHECK(c.c == 0.0);
        CHECK(c.alpha == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("diffusion coefficient 1 - a equals 1 - 2 m rho") {
        const auto p = FlowParams::make(0.1, 2, 3, 0.0);
        CHECK(1.0 - p.a_coeff == doctest::Approx(1.0 - 0.4));
        CHECK(p.parabolic());
    }
    SUBCASE("c carries the fiber curvature") {
        const auto p = FlowParams::make(0.0, 2, 1, -2.0);
        const auto c = unified_coefficients(p, Eigen::VectorXd::Zero(1));
        // ((m rho - 1) / (m sigma)) S_F with sigma = 1/2
        CHECK(c.c == doctest::Approx(2.0));
        CHECK(c.alpha == doctest::Approx(0.0));
    }
    SUBCASE("sigma = 0 cannot be mapped") {
        const auto p = FlowParams::make(0.25, 2, 2, 0.0);
        CHECK(p.sigma == doctest::Approx(0.0));
        CHECK_THROWS_AS(unified_coefficients(p, Eigen::VectorXd::Zero(2)), PoleError);
    }
}

TEST_CASE("parabolicity flag") {
    CHECK_FALSE(FlowParams::make(2.0, 1, 2, 0.0).parabolic());
    CHECK(FlowParams::make(-1.0, 1, 2, 0.0).parabolic());
}
