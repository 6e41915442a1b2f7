#include "rbflow/problems.hpp"

#include <cmath>
#include <numbers>

#include "rbflow/ansatz.hpp"
#include "rbflow/errors.hpp"
#include "rbflow/profile.hpp"

namespace rbflow {

std::vector<std::string> simulation_names() { return {"heat-reduction", "heat-offset", "cosh-einstein"}; }

SimulationProblem simulation_problem(const std::string& name, int npts, int total_dimension) {
    constexpr double pi = std::numbers::pi;
    SimulationProblem sp;
    sp.name = name;
    if (name == "heat-reduction" || name == "heat-offset") {
        const double offset = name == "heat-offset" ? 1.0 : 0.0;
        sp.params = FlowParams::make(0.0, 1, 1, 0.0);
        sp.grid = Grid1D::make(0.0, pi, npts);
        const Eigen::VectorXd x = sp.grid.nodes();
        sp.initial.a = Eigen::VectorXd::Ones(npts);
        sp.initial.f = offset + x.array().sin();
        sp.initial.f[0] = sp.initial.f[npts - 1] = offset;
        sp.initial.phi = Eigen::VectorXd::Zero(npts);
        sp.freeze_metric = true;
        sp.boundary = [offset](double) { return std::array<double, 4>{1.0, 1.0, offset, offset}; };
        sp.exact = [offset](double xv, double t) {
            return std::pair<double, double>{1.0, offset + std::exp(-t) * std::sin(xv)};
        };
    } else if (name == "cosh-einstein") {
        if (total_dimension < 2) throw DomainError("problems", "simulation_problem", "total dimension must be >= 2");
        const int m = total_dimension - 1;
        const double rate = 2.0 * m;
        sp.params = FlowParams::make(0.0, m, 1, -static_cast<double>(m) * (m - 1));
        sp.grid = Grid1D::make(-2.0, 2.0, npts);
        const Eigen::VectorXd x = sp.grid.nodes();
        sp.initial.a = Eigen::VectorXd::Ones(npts);
        sp.initial.f = x.array().cosh();
        sp.initial.phi = Eigen::VectorXd::Zero(npts);
        sp.boundary = [rate](double t) {
            const double a = 1.0 + rate * t;
            const double f = std::sqrt(a) * std::cosh(2.0);
            return std::array<double, 4>{a, a, f, f};
        };
        sp.exact = [rate](double xv, double t) {
            const double a = 1.0 + rate * t;
            return std::pair<double, double>{a, std::sqrt(a) * std::cosh(xv)};
        };
    } else {
        throw UnknownScenario("problems", "simulation_problem", "no simulation problem named '" + name + "'");
    }
    sp.initial.t = 0.0;
    sp.initial.provenance = name + " initial slice";
    return sp;
}

// ---------------------------------------------------------------------------

EstimateSuite heat_estimate_suite(double R, int refine) {
    constexpr double pi = std::numbers::pi;
    EstimateSuite s;
    s.name = "heat-reduction";
    const auto sp = simulation_problem("heat-offset", 100 * refine + 1);
    std::vector<double> times;
    for (int k = 1; k <= 10; ++k) times.push_back(0.05 * k);
    SolverConfig cfg;
    cfg.freeze_metric = true;
    const auto traj = evolve_coupled(sp.initial, sp.params, sp.grid, times, cfg, sp.boundary);

    auto& ep = s.params;
    ep.p = 1.0;
    ep.D = 2.0;
    ep.q = 1.0 + std::log(ep.D);
    ep.delta = 1.0;
    ep.R = R;
    ep.t0 = 0.5;
    ep.T = 0.5;
    ep.tau = 0.25;
    ep.mode = TimeMode::Backward;
    s.gamma = gamma_bar(RadialModel{RadialModel::Kind::Line, 1, 1.0}, Drift::none(), 0.0);
    s.c = 0.0;
    s.alpha = -1.0;

    const double h = sp.grid.step();
    for (const auto& state : traj) {
        Eigen::VectorXd d1, d2;
        fd4_derivatives(state.f, h, d1, d2);
        for (int i = 0; i < sp.grid.npts; ++i) {
            const double u = state.f[i];
            s.samples.push_back({state.t, std::abs(sp.grid.x(i) - 0.5 * pi), u, std::abs(d1[i]) / u, 0.0, 0.0});
            s.hypotheses.push_back({state.t, std::abs(sp.grid.x(i) - 0.5 * pi), 0.0, 0.0});
        }
    }
    return s;
}

EstimateSuite hyperbolic_estimate_suite(double R, int refine) {
    constexpr double pi = std::numbers::pi;
    EstimateSuite s;
    s.name = "hyperbolic-immortal";
    const Scenario sc = catalog("hyperbolic-immortal");
    const double abar = 1.0 - sc.params.a_coeff;
    const double rho = sc.params.rho, sigma = sc.params.sigma;

    auto& ep = s.params;
    ep.p = 1e-3;
    ep.q = 1.1;
    ep.delta = 1.0;
    ep.k1 = 7.0 / 3.0;
    ep.k2 = 0.0;
    ep.R = R;
    ep.t0 = 0.0;
    ep.T = 0.1;
    ep.tau = -0.05;
    ep.a_coeff = sc.params.a_coeff;
    ep.mode = TimeMode::Forward;
    s.gamma = gamma_bar(RadialModel{RadialModel::Kind::Hyperbolic, 2, 1.0}, Drift::busemann(2.0 * sc.params.m),
                        sc.params.a_coeff);
    s.c = 0.0;
    s.alpha = sc.params.alpha_exp;

    const int ns = 16 * refine + 1, ntheta = 16 * refine;
    double u_max = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double t = j * ep.T / 10.0;
        const double stretch = std::sqrt(sc.constants.base_factor(t));
        const double s_max = 0.5 * R / stretch;
        for (int a = 0; a < ns; ++a) {
            const double geo = s_max * a / (ns - 1);
            for (int b = 0; b < ntheta; ++b) {
                const double th = 2.0 * pi * b / ntheta;
                Eigen::Vector2d x(std::sinh(geo) * std::sin(th), std::cosh(geo) + std::sinh(geo) * std::cos(th));
                const auto g = sc.local_geometry(x, t);
                const double f = g.warp.f;
                const double u = std::pow(f, 1.0 / sigma);
                const double grad_log_u = std::sqrt(g.warp.grad_sq) / (sigma * f);
                const double b_val = rho / sigma * g.base.scalar;
                s.samples.push_back({t, stretch * geo, u, grad_log_u, b_val, 0.0});
                u_max = std::max(u_max, u);

                const double g00 = g.base.metric(0, 0);
                const Eigen::MatrixXd m = abar * g.base.ricci + g.hess_phi;
                const double ric_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff() / g00;
                const double eps = 1e-6;
                const double dg = (sc.base_metric(x, t + eps)(0, 0) - sc.base_metric(x, t - eps)(0, 0)) / (2.0 * eps);
                s.hypotheses.push_back({t, stretch * geo, ric_min, dg / g00});
            }
        }
    }
    ep.D = u_max;
    return s;
}

EstimateSuite estimate_suite(const std::string& name, double R, int refine) {
    if (name == "heat-reduction") return heat_estimate_suite(R, refine);
    if (name == "hyperbolic-immortal") return hyperbolic_estimate_suite(R, refine);
    throw UnknownScenario("problems", "estimate_suite", "no estimate suite named '" + name + "'");
}

// ---------------------------------------------------------------------------

IdentityCase synthetic_identity_case(int level, bool constant_u) {
    const int intervals = 40 << level;
    const double h = 4.0 / intervals;
    const double dt = h, tm = 0.5;
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(intervals + 1, -2.0, 2.0);
    IdentityCase out;
    out.data.step = h;
    out.data.dt = dt;
    out.data.phi = 0.3 * x.array().square() + 0.2 * x.array().sin();
    for (int k = 0; k < 3; ++k) {
        const double t = tm + (k - 1) * dt;
        if (constant_u) {
            out.data.u[k] = Eigen::VectorXd::Constant(x.size(), 1.5);
        } else {
            out.data.u[k] = 1.0 + 0.5 * (1.0 + t) * (-x.array().square()).exp() + 0.1 * (x.array() + t).sin();
        }
        out.data.metric[k] = 1.0 + 0.1 * t * x.array().cos() + x.array().square() / 20.0;
    }
    out.params = IdentityParams{0.7, 3.0, 0.6, 0.5, -1.0 / 3.0};
    for (double xv : {-1.0, -0.5, 0.0, 0.5, 1.0}) out.nodes.push_back(static_cast<int>(std::lround((xv + 2.0) / h)));
    return out;
}

}  // namespace rbflow
