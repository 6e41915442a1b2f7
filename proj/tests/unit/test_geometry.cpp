#include <array>
#include <cmath>

#include "curvature_oracle.hpp"
#include "doctest.h"
#include "rbflow/errors.hpp"
#include "rbflow/geometry.hpp"

using namespace rbflow;

namespace {

const Interval kPos = Interval::open(0.0, std::numeric_limits<double>::infinity());

Profile power(const char* name) {
    return Profile::analytic(name, [](double x) { return Jet2{x, 1.0, 0.0}; }, kPos);
}
Profile expo(const char* name) {
    return Profile::analytic(name, [](double x) { return Jet2{std::exp(x), std::exp(x), std::exp(x)}; });
}
Profile square() {
    return Profile::analytic("sq", [](double x) { return Jet2{x * x, 2.0 * x, 2.0}; });
}

// mu(xi)^{-2} times the identity as a function of the coordinates
oracle::Metric conformal(std::function<double(double)> mu, Eigen::VectorXd axis) {
    return [mu, axis](const Eigen::VectorXd& x) {
        const double m = mu(axis.dot(x));
        return Eigen::MatrixXd(Eigen::MatrixXd::Identity(x.size(), x.size()) / (m * m));
    };
}

}  // namespace

TEST_CASE("conformal Ricci against the finite-difference oracle") {
    SUBCASE("hyperbolic plane at xi = 1") {
        const auto ps = ProfileSet::make(power("mu"), power("f"), Profile::constant(0.0, kPos));
        const auto frame = AnsatzFrame::last_axis(2, kPos);
        CHECK(conformal_ricci(ps, frame, 1.0, 1, 1) == doctest::Approx(-1.0).epsilon(1e-13));
        const Eigen::VectorXd x = Eigen::Vector2d(0.3, 1.0);
        const auto ric = oracle::ricci(conformal([](double s) { return s; }, frame.axis), x);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(conformal_ricci(ps, frame, 1.0, i, j) == doctest::Approx(ric(i, j)).epsilon(1e-6));
    }
    SUBCASE("mu = e^xi in two dimensions is flat") {
        const auto ps = ProfileSet::make(expo("mu"), expo("f"), expo("phi"));
        const auto frame = AnsatzFrame::last_axis(2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(conformal_ricci(ps, frame, 0.0, i, j)) < 1e-14);
        const auto ric = oracle::ricci(conformal([](double s) { return std::exp(s); }, frame.axis), Eigen::Vector2d(0.1, 0.0));
        CHECK(ric.cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("tilted axis in three dimensions") {
        Eigen::VectorXd axis = Eigen::Vector3d(1.0, 2.0, 2.0) / 3.0;
        const auto ps = ProfileSet::make(expo("mu"), expo("f"), expo("phi"));
        const auto frame = AnsatzFrame::make(axis);
        const Eigen::VectorXd x = Eigen::Vector3d(0.2, -0.1, 0.3);
        const auto ric = oracle::ricci(conformal([](double s) { return std::exp(s); }, axis), x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(conformal_ricci(ps, frame, frame.xi(x), i, j) == doctest::Approx(ric(i, j)).epsilon(1e-5));
    }
    SUBCASE("constant mu is flat") {
        const auto ps = ProfileSet::make(Profile::constant(2.0), Profile::constant(1.0), Profile::constant(0.0));
        const auto frame = AnsatzFrame::last_axis(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(conformal_ricci(ps, frame, 0.7, i, j) == 0.0);
    }
}

TEST_CASE("conformal scalar curvature") {
    const auto hyp = ProfileSet::make(power("mu"), power("f"), Profile::constant(0.0, kPos));
    for (double xi : {0.3, 1.0, 4.0}) CHECK(conformal_scalar(hyp, 3, xi) == doctest::Approx(-6.0).epsilon(1e-13));
    const auto ex = ProfileSet::make(expo("mu"), expo("f"), expo("phi"));
    CHECK(conformal_scalar(ex, 3, 0.0) == doctest::Approx(-2.0).epsilon(1e-14));
    const auto flat = ProfileSet::make(Profile::constant(3.0), Profile::constant(1.0), Profile::constant(0.0));
    CHECK(conformal_scalar(flat, 3, 0.5) == 0.0);

    SUBCASE("trace of the Ricci tensor") {
        const auto frame = AnsatzFrame::last_axis(3);
        const double xi = 0.4, mu = std::exp(xi);
        double trace = 0.0;
        for (int i = 0; i < 3; ++i) trace += mu * mu * conformal_ricci(ex, frame, xi, i, i);
        CHECK(conformal_scalar(ex, 3, xi) == doctest::Approx(trace).epsilon(1e-13));
        const auto g = conformal([](double s) { return std::exp(s); }, frame.axis);
        CHECK(conformal_scalar(ex, 3, xi) == doctest::Approx(oracle::scalar(g, Eigen::Vector3d(0.0, 0.0, xi))).epsilon(1e-5));
    }
}

TEST_CASE("Hessian and Laplacian of the warping function") {
    SUBCASE("constant f") {
        const auto ps = ProfileSet::make(power("mu"), Profile::constant(2.0, kPos), Profile::constant(0.0, kPos));
        const auto frame = AnsatzFrame::last_axis(3, kPos);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(conformal_hessian(ps.f, ps, frame, 1.5, i, j) == 0.0);
        CHECK(conformal_laplacian(ps.f, ps, 3, 1.5) == 0.0);
    }
    SUBCASE("f = xi on the hyperbolic plane is harmonic") {
        const auto ps = ProfileSet::make(power("mu"), power("f"), Profile::constant(0.0, kPos));
        for (double xi : {0.2, 1.0, 3.0}) CHECK(std::abs(conformal_laplacian(ps.f, ps, 2, xi)) < 1e-14);
    }
    SUBCASE("f = xi^2 on flat R^3") {
        const auto ps = ProfileSet::make(Profile::constant(1.0), square(), Profile::constant(0.0));
        CHECK(conformal_laplacian(ps.f, ps, 3, 0.8) == doctest::Approx(2.0));
    }
    SUBCASE("Hessian against Christoffel symbols of the oracle") {
        const auto ps = ProfileSet::make(expo("mu"), square(), Profile::constant(0.0));
        Eigen::VectorXd axis = Eigen::Vector3d(0.0, 0.6, 0.8);
        const auto frame = AnsatzFrame::make(axis);
        const Eigen::VectorXd x = Eigen::Vector3d(0.1, 0.2, 0.3);
        const double xi = frame.xi(x);
        const auto gam = oracle::christoffel(conformal([](double s) { return std::exp(s); }, axis), x, 1e-5);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double expected = 2.0 * axis[i] * axis[j];
                for (int k = 0; k < 3; ++k) expected -= gam[k](i, j) * 2.0 * xi * axis[k];
                CHECK(conformal_hessian(ps.f, ps, frame, xi, i, j) == doctest::Approx(expected).epsilon(1e-7));
            }
    }
}

TEST_CASE("gradient terms") {
    const auto c = Profile::constant(1.0, kPos);
    const auto ps = ProfileSet::make(power("mu"), power("f"), c);
    auto g = grad_terms(ps.f, c, ps, 2.0);
    CHECK(g.df_dphi == 0.0);
    CHECK(g.grad_f_sq == doctest::Approx(4.0));
    const auto phi = Profile::analytic("phi", [](double x) { return Jet2{2.0 * std::log(x), 2.0 / x, -2.0 / (x * x)}; }, kPos);
    g = grad_terms(ps.f, phi, ps, 1.0);
    CHECK(g.df_dphi == doctest::Approx(2.0));
    CHECK(g.grad_f_sq == doctest::Approx(1.0));
    g = grad_terms(c, phi, ps, 1.0);
    CHECK(g.df_dphi == 0.0);
    CHECK(g.grad_f_sq == 0.0);
}

TEST_CASE("warped product components") {
    BaseCurvature<double> line{Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1), 0.0};

    SUBCASE("unit warp over a Ricci-flat fiber is a product") {
        BaseCurvature<double> b{Eigen::MatrixXd::Identity(2, 2), -Eigen::MatrixXd::Identity(2, 2), -2.0};
        WarpingData<double> w{1.0, Eigen::MatrixXd::Zero(2, 2), 0.0, 0.0};
        const auto c = warped_components(b, w, {3, 0.0, 0.0});
        CHECK(c.scalar == doctest::Approx(-2.0));
        CHECK(c.ric_vertical_coeff == 0.0);
    }
    SUBCASE("unit warp over a round fiber") {
        WarpingData<double> w{1.0, Eigen::MatrixXd::Zero(1, 1), 0.0, 0.0};
        const auto c = warped_components(line, w, {2, 2.0, 1.0});
        CHECK(c.scalar == doctest::Approx(2.0));
    }
    SUBCASE("cosh r over a hyperbolic fiber is Einstein") {
        for (int n : {3, 4, 5}) {
            const int m = n - 1;
            for (double r : {-1.0, 0.0, 0.7}) {
                WarpingData<double> w{std::cosh(r), Eigen::MatrixXd::Constant(1, 1, std::cosh(r)), std::cosh(r),
                                      std::sinh(r) * std::sinh(r)};
                const double ric = -(n - 2.0);
                const auto c = warped_components(line, w, {m, m * ric, ric});
                CHECK(c.ric_vertical_coeff == doctest::Approx(-(n - 1.0) * std::cosh(r) * std::cosh(r)));
                CHECK(c.ric_horizontal(0, 0) == doctest::Approx(-(n - 1.0)));
                CHECK(c.scalar == doctest::Approx(-n * (n - 1.0)));
            }
        }
    }
    SUBCASE("against the oracle on a warped product with round fiber") {
        // base mu = e^xi in R^2 along e_2, f = 1 + xi^2, unit S^2 fiber in (theta, psi)
        const double xi = 0.3;
        oracle::Metric g = [](const Eigen::VectorXd& x) {
            const double mu = std::exp(x[1]), f = 1.0 + x[1] * x[1];
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
            m(0, 0) = m(1, 1) = 1.0 / (mu * mu);
            m(2, 2) = f * f;
            m(3, 3) = f * f * std::sin(x[2]) * std::sin(x[2]);
            return m;
        };
        const Eigen::VectorXd x = (Eigen::VectorXd(4) << 0.0, xi, 1.0, 0.0).finished();
        const auto ric = oracle::ricci(g, x);

        const auto mu = expo("mu");
        const auto fp = Profile::analytic("f", [](double s) { return Jet2{1.0 + s * s, 2.0 * s, 2.0}; });
        const auto ps = ProfileSet::make(mu, fp, expo("phi"));
        const auto frame = AnsatzFrame::last_axis(2);
        const auto pt = ps.at(xi);
        BaseCurvature<double> b{conformal_metric<double>(pt.mu, 2), conformal_ricci_tensor<double>(pt.mu, frame.axis),
                                conformal_scalar<double>(pt.mu, 2)};
        WarpingData<double> w{pt.f.v, conformal_hessian_tensor<double>(pt.f, pt.mu, frame.axis),
                              conformal_laplacian<double>(pt.f, pt.mu, 2), grad_terms<double>(pt.f, pt.phi, pt.mu).grad_f_sq};
        const auto c = warped_components(b, w, {2, 2.0, 1.0});
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(c.ric_horizontal(i, j) == doctest::Approx(ric(i, j)).epsilon(1e-5));
        CHECK(c.ric_vertical_coeff == doctest::Approx(ric(2, 2)).epsilon(1e-5));
        CHECK(c.scalar == doctest::Approx(oracle::scalar(g, x)).epsilon(1e-5));
    }
    SUBCASE("guards") {
        WarpingData<double> w{0.0, Eigen::MatrixXd::Zero(1, 1), 0.0, 0.0};
        CHECK_THROWS_AS(warped_components(line, w, {1, 0.0, 0.0}), PositivityError);
        w.f = 1.0;
        CHECK_THROWS_AS(warped_components(line, w, {2, 1.0, 1.0}), DomainError);
    }
}

TEST_CASE("drifted Laplacian") {
    const LineMetric<double> flat{1.0, 0.0};
    CHECK(drifted_laplacian(Jet2{2.0, 1.0, 0.0}, Jet2{0.0, 0.0, 0.0}, flat) == 0.0);
    CHECK(drifted_laplacian(Jet2{0.0, 1.0, 0.0}, Jet2{0.0, 1.0, 0.0}, flat) == -1.0);
    const double r = 1.0;
    CHECK(drifted_laplacian(Jet2{std::cosh(r), std::sinh(r), std::cosh(r)}, Jet2{r, 1.0, 0.0}, flat) ==
          doctest::Approx(std::cosh(1.0) - std::sinh(1.0)));

    SUBCASE("grid version") {
        const int n = 11;
        const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
        CHECK(drifted_laplacian(x, x, Eigen::VectorXd::Ones(n), 0.1, 5) == doctest::Approx(-1.0));
        const Eigen::VectorXd u = x.array().square();
        CHECK(drifted_laplacian(u, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n), 0.1, 4) == doctest::Approx(2.0));
    }
    SUBCASE("n-dimensional pieces") {
        const Eigen::VectorXd du = Eigen::Vector2d(1.0, 2.0), dphi = Eigen::Vector2d(3.0, -1.0);
        CHECK(drifted_laplacian<double>(0.5, du, dphi, Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(-0.5));
    }
}

TEST_CASE("curvature norms of space forms") {
    const Eigen::MatrixXd g2 = Eigen::MatrixXd::Identity(2, 2);
    CHECK(conformally_flat_rm_norm_sq<double>(-g2, g2, -2.0, 2) == doctest::Approx(4.0));
    const Eigen::MatrixXd g3 = Eigen::MatrixXd::Identity(3, 3);
    CHECK(conformally_flat_rm_norm_sq<double>(-2.0 * g3, g3, -6.0, 3) == doctest::Approx(12.0));
    const Eigen::MatrixXd g4 = Eigen::MatrixXd::Identity(4, 4);
    CHECK(conformally_flat_rm_norm_sq<double>(-3.0 * g4, g4, -12.0, 4) == doctest::Approx(24.0));
}

TEST_CASE("profiles") {
    SUBCASE("sampled profiles converge under refinement") {
        // nodal jets are fourth order; between nodes the Hermite interpolant
        // loses one order per derivative beyond the first
        std::array<double, 3> prev{};
        for (int n : {41, 81, 161}) {
            const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 0.0, 2.0);
            const auto p = Profile::sampled("sin", 0.0, 2.0, x.array().sin().matrix());
            std::array<double, 3> err{};
            for (int i = 0; i <= 400; ++i) {
                const double s = 0.3 + 1.4 * i / 400.0;
                const auto j = p.eval(s);
                err[0] = std::max(err[0], std::abs(j.v - std::sin(s)));
                err[1] = std::max(err[1], std::abs(j.d1 - std::cos(s)));
                err[2] = std::max(err[2], std::abs(j.d2 + std::sin(s)));
            }
            if (n > 41) {
                CHECK(std::log2(prev[0] / err[0]) > 4.5);
                CHECK(std::log2(prev[1] / err[1]) > 3.5);
                CHECK(std::log2(prev[2] / err[2]) > 2.5);
            }
            prev = err;
        }
        Eigen::VectorXd d1, d2;
        const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(81, 0.0, 2.0);
        fd4_derivatives(x.array().sin().matrix(), 0.025, d1, d2);
        CHECK((d1 - x.array().cos().matrix()).cwiseAbs().maxCoeff() < 1e-7);
        CHECK((d2 + x.array().sin().matrix()).cwiseAbs().maxCoeff() < 1e-5);
    }
    SUBCASE("domain guards") {
        const auto p = Profile::sampled("x", 0.0, 1.0, Eigen::VectorXd::LinSpaced(6, 0.0, 1.0));
        CHECK_THROWS_AS(p.eval(1.5), DomainError);
        CHECK_THROWS_AS(power("mu").eval(-1.0), DomainError);
        CHECK_THROWS_AS(Profile::sampled("x", 0.0, 1.0, Eigen::VectorXd::Ones(4)), DomainError);
    }
    SUBCASE("profile sets") {
        const auto mixed = [] {
            return ProfileSet::make(Profile::sampled("a", 0.0, 1.0, Eigen::VectorXd::Ones(6)), Profile::constant(1.0),
                                    Profile::constant(0.0));
        };
        CHECK_THROWS_AS(mixed(), DomainError);
        const auto ps = ProfileSet::make(Profile::constant(-1.0), Profile::constant(1.0), Profile::constant(0.0));
        CHECK_THROWS_AS(ps.at(0.0), PositivityError);
        CHECK_THROWS_AS(AnsatzFrame::make(Eigen::Vector2d(1.0, 1.0)), DomainError);
    }
}
