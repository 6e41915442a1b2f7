#include "rbflow/reduced_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbflow/errors.hpp"

namespace rbflow {

Grid1D Grid1D::make(double x_lo, double x_hi, int npts) {
    if (npts < 3) throw DomainError("reduced_flow", "Grid1D::make", "need at least 3 nodes");
    if (!(x_hi > x_lo)) throw DomainError("reduced_flow", "Grid1D::make", "empty interval");
    return {x_lo, x_hi, npts};
}

void SolverConfig::validate() const {
    if (!(cfl > 0.0 && cfl <= 0.5)) {
        throw ConfigError("reduced_flow", "SolverConfig", "cfl must lie in (0, 0.5], got " + std::to_string(cfl));
    }
    if (dt_policy == DtPolicy::Fixed && !(dt > 0.0)) {
        throw ConfigError("reduced_flow", "SolverConfig", "a fixed step must be positive");
    }
    if (!(u_floor >= 0.0)) throw ConfigError("reduced_flow", "SolverConfig", "u_floor must be nonnegative");
}

namespace {

// Second-order first derivative of a coefficient field, one-sided at the ends.
Eigen::VectorXd field_d1(const Eigen::VectorXd& w, double h) {
    const Eigen::Index n = w.size();
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 1; i + 1 < n; ++i) d[i] = (w[i + 1] - w[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h);
    d[n - 1] = (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * h);
    return d;
}

struct Derivs {
    double d1 = 0.0;
    double d2 = 0.0;
};

Derivs node_derivs(const Eigen::Ref<const Eigen::VectorXd>& w, Eigen::Index i, double h, Boundary boundary) {
    const Eigen::Index n = w.size();
    if (i > 0 && i + 1 < n) {
        return {(w[i + 1] - w[i - 1]) / (2.0 * h), (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h)};
    }
    if (boundary == Boundary::Neumann0) {
        const Eigen::Index j = (i == 0) ? 1 : n - 2;
        return {0.0, 2.0 * (w[j] - w[i]) / (h * h)};
    }
    return {};
}

void check_sizes(const ScalarProblem& p, Eigen::Index usize) {
    const Eigen::Index n = p.grid.npts;
    if (usize != n || p.phi.size() != n || p.metric.size() != n) {
        throw DomainError("reduced_flow", "step_scalar", "field sizes do not match the grid");
    }
    if (p.coeffs.b.size() != 0 && p.coeffs.b.size() != n) {
        throw DomainError("reduced_flow", "step_scalar", "b must be empty or one value per node");
    }
    if ((p.metric.array() <= 0.0).any()) {
        throw DomainError("reduced_flow", "step_scalar", "metric factor must be positive");
    }
}

void check_parabolic(double a, const char* op) {
    if (!(1.0 - a > 0.0)) {
        throw NonParabolic("reduced_flow", op, "1 - a = " + std::to_string(1.0 - a) + " is not positive");
    }
}

double policy_dt(double diffusion_max, double h, const SolverConfig& config) {
    const double factor = config.dt_policy == DtPolicy::Cfl ? config.cfl : 0.5;
    return factor * h * h / diffusion_max;
}

void check_floor(const Eigen::Ref<const Eigen::VectorXd>& u, double floor, Boundary boundary, const char* op,
                 const char* what, double t) {
    const Eigen::Index lo = boundary == Boundary::DirichletFromExact ? 1 : 0;
    const Eigen::Index hi = boundary == Boundary::DirichletFromExact ? u.size() - 1 : u.size();
    for (Eigen::Index i = lo; i < hi; ++i) {
        if (!(u[i] >= floor)) {
            throw FloorBreach("reduced_flow", op,
                              std::string(what) + " = " + std::to_string(u[i]) + " below floor at node " +
                                  std::to_string(i) + ", t = " + std::to_string(t));
        }
    }
}

// Splits [t, t_end] into equal steps no longer than dt_max.
int step_count(double span, double dt_max) {
    return std::max(1, static_cast<int>(std::ceil(span / dt_max - 1e-9)));
}

}  // namespace

// ---------------------------------------------------------------------------
// scalar equation

double max_stable_dt(const ScalarProblem& problem, const SolverConfig& config) {
    check_parabolic(problem.coeffs.a, "max_stable_dt");
    const double diffusion = (1.0 - problem.coeffs.a) / problem.metric.minCoeff();
    return policy_dt(diffusion, problem.grid.step(), config);
}

Eigen::VectorXd scalar_rhs(const ScalarProblem& p, const Eigen::Ref<const Eigen::VectorXd>& u, Boundary boundary) {
    check_sizes(p, u.size());
    const double h = p.grid.step();
    const Eigen::VectorXd metric_x = field_d1(p.metric, h);
    const Eigen::VectorXd phi_x = field_d1(p.phi, h);
    const double abar = 1.0 - p.coeffs.a;
    const Eigen::Index n = u.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool edge = (i == 0 || i + 1 == n);
        if (edge && boundary == Boundary::DirichletFromExact) continue;
        const Derivs du = node_derivs(u, i, h, boundary);
        const double a = p.metric[i];
        const double gamma = metric_x[i] / (2.0 * a);
        const double dphi = edge ? 0.0 : phi_x[i];
        const double lap = (du.d2 - gamma * du.d1) / a;
        double value = abar * lap - dphi * du.d1 / a;
        if (p.coeffs.b.size() != 0) value += p.coeffs.b[i] * u[i];
        if (p.coeffs.c != 0.0) value += p.coeffs.c * std::pow(u[i], p.coeffs.alpha);
        out[i] = value;
    }
    return out;
}

Eigen::VectorXd step_scalar(const ScalarProblem& p, const Eigen::Ref<const Eigen::VectorXd>& u, double t, double dt,
                            const SolverConfig& config) {
    config.validate();
    check_parabolic(p.coeffs.a, "step_scalar");
    check_sizes(p, u.size());
    const double limit = max_stable_dt(p, config);
    if (!(dt > 0.0) || dt > limit * (1.0 + 1e-9)) {
        throw CFLViolation("reduced_flow", "step_scalar",
                           "dt = " + std::to_string(dt) + " exceeds the limit " + std::to_string(limit));
    }
    const bool dirichlet = config.boundary == Boundary::DirichletFromExact;
    if (dirichlet && !p.boundary) {
        throw ConfigError("reduced_flow", "step_scalar", "Dirichlet boundary needs boundary data");
    }
    const Eigen::Index n = u.size();
    auto pin = [&](Eigen::VectorXd& w, double time) {
        if (!dirichlet) return;
        const auto [left, right] = p.boundary(time);
        w[0] = left;
        w[n - 1] = right;
    };
    auto rhs = [&](const Eigen::VectorXd& w, double time) {
        check_floor(w, config.u_floor, config.boundary, "step_scalar", "u", time);
        return scalar_rhs(p, w, config.boundary);
    };

    Eigen::VectorXd next;
    const Eigen::VectorXd u0 = u;
    if (config.integrator == Integrator::ExplicitEuler) {
        next = u0 + dt * rhs(u0, t);
    } else {
        const Eigen::VectorXd k1 = rhs(u0, t);
        Eigen::VectorXd w = u0 + 0.5 * dt * k1;
        pin(w, t + 0.5 * dt);
        const Eigen::VectorXd k2 = rhs(w, t + 0.5 * dt);
        w = u0 + 0.5 * dt * k2;
        pin(w, t + 0.5 * dt);
        const Eigen::VectorXd k3 = rhs(w, t + 0.5 * dt);
        w = u0 + dt * k3;
        pin(w, t + dt);
        const Eigen::VectorXd k4 = rhs(w, t + dt);
        next = u0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    pin(next, t + dt);
    check_floor(next, config.u_floor, config.boundary, "step_scalar", "u", t + dt);
    return next;
}

ScalarTrajectory evolve_scalar(const ScalarProblem& p, const Eigen::Ref<const Eigen::VectorXd>& u0, double t0,
                               std::span<const double> output_times, const SolverConfig& config) {
    config.validate();
    check_parabolic(p.coeffs.a, "evolve_scalar");
    const double dt_max = config.dt_policy == DtPolicy::Fixed ? config.dt : max_stable_dt(p, config);
    ScalarTrajectory traj;
    Eigen::VectorXd u = u0;
    double t = t0;
    for (double t_out : output_times) {
        if (t_out < t) throw DomainError("reduced_flow", "evolve_scalar", "output times must be increasing from t0");
        if (config.dt_policy == DtPolicy::Fixed) {
            while (t_out - t > 1e-12 * std::max(1.0, std::abs(t_out))) {
                const double dt = std::min(dt_max, t_out - t);
                u = step_scalar(p, u, t, dt, config);
                t += dt;
            }
        } else if (t_out > t) {
            const int steps = step_count(t_out - t, dt_max);
            const double dt = (t_out - t) / steps;
            const double start = t;
            for (int s = 0; s < steps; ++s) {
                u = step_scalar(p, u, start + s * dt, dt, config);
            }
        }
        t = t_out;
        traj.t.push_back(t);
        traj.u.push_back(u);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// coupled base system

CoupledRates coupled_rhs(const CoupledState& s, const FlowParams& params, const Grid1D& grid, Boundary boundary,
                         bool freeze_metric) {
    const Eigen::Index n = grid.npts;
    const double h = grid.step();
    const double m = params.m, rho = params.rho, sf = params.s_fiber;
    CoupledRates r{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool edge = (i == 0 || i + 1 == n);
        if (edge && boundary == Boundary::DirichletFromExact) continue;
        const Derivs fa = node_derivs(s.a, i, h, boundary);
        const Derivs ff = node_derivs(s.f, i, h, boundary);
        const Derivs fp = node_derivs(s.phi, i, h, boundary);
        const double a = s.a[i], f = s.f[i];
        const double gamma = fa.d1 / (2.0 * a);
        const double hess_f = ff.d2 - gamma * ff.d1;
        const double lap_f = hess_f / a;
        const double grad_sq = ff.d1 * ff.d1 / a;
        const double df_dphi = ff.d1 * fp.d1 / a;
        const double hess_phi = fp.d2 - gamma * fp.d1;
        const double scalar = sf / (f * f) - 2.0 * m * lap_f / f - m * (m - 1.0) * grad_sq / (f * f);
        if (!freeze_metric) r.a_t[i] = (2.0 * m / f) * hess_f - 2.0 * hess_phi + 2.0 * rho * scalar * a;
        r.f_t[i] = (1.0 - 2.0 * m * rho) * lap_f + (m - 1.0) * (1.0 - m * rho) * grad_sq / f - df_dphi +
                   ((m * rho - 1.0) / m) * sf / f;
    }
    return r;
}

CoupledRates coupled_rhs(const CoupledState& state, const FlowParams& params, const Grid1D& grid) {
    return coupled_rhs(state, params, grid, Boundary::Neumann0, false);
}

std::vector<CoupledState> evolve_coupled(const CoupledState& state0, const FlowParams& params, const Grid1D& grid,
                                         std::span<const double> output_times, const SolverConfig& config,
                                         const CoupledBoundaryFn& boundary) {
    config.validate();
    const Eigen::Index n = grid.npts;
    if (state0.a.size() != n || state0.f.size() != n || state0.phi.size() != n) {
        throw DomainError("reduced_flow", "evolve_coupled", "field sizes do not match the grid");
    }
    const double diffusion_coeff = 1.0 - 2.0 * params.m * params.rho;
    check_parabolic(2.0 * params.m * params.rho, "evolve_coupled");
    const bool dirichlet = config.boundary == Boundary::DirichletFromExact;
    if (dirichlet && !boundary) {
        throw ConfigError("reduced_flow", "evolve_coupled", "Dirichlet boundary needs boundary data");
    }
    if ((state0.a.array() <= 0.0).any()) {
        throw FloorBreach("reduced_flow", "evolve_coupled", "initial metric factor not positive");
    }
    check_floor(state0.f, config.u_floor, config.boundary, "evolve_coupled", "f", state0.t);

    const double h = grid.step();
    auto pin = [&](CoupledState& s) {
        if (!dirichlet) return;
        const auto b = boundary(s.t);
        if (!config.freeze_metric) {
            s.a[0] = b[0];
            s.a[n - 1] = b[1];
        }
        s.f[0] = b[2];
        s.f[n - 1] = b[3];
    };
    auto check = [&](const CoupledState& s) {
        check_floor(s.a, config.u_floor, config.boundary, "evolve_coupled", "a", s.t);
        check_floor(s.f, config.u_floor, config.boundary, "evolve_coupled", "f", s.t);
    };
    auto rates = [&](const CoupledState& s) {
        check(s);
        return coupled_rhs(s, params, grid, config.boundary, config.freeze_metric);
    };
    auto advance = [&](const CoupledState& base, const CoupledRates& k, double dt) {
        CoupledState s = base;
        s.t = base.t + dt;
        s.a = base.a + dt * k.a_t;
        s.f = base.f + dt * k.f_t;
        pin(s);
        return s;
    };
    auto step = [&](const CoupledState& s, double dt) {
        if (config.integrator == Integrator::ExplicitEuler) return advance(s, rates(s), dt);
        const CoupledRates k1 = rates(s);
        const CoupledRates k2 = rates(advance(s, k1, 0.5 * dt));
        const CoupledRates k3 = rates(advance(s, k2, 0.5 * dt));
        const CoupledRates k4 = rates(advance(s, k3, dt));
        CoupledRates k{(k1.a_t + 2.0 * k2.a_t + 2.0 * k3.a_t + k4.a_t) / 6.0,
                       (k1.f_t + 2.0 * k2.f_t + 2.0 * k3.f_t + k4.f_t) / 6.0};
        return advance(s, k, dt);
    };
    auto limit = [&](const CoupledState& s) {
        return policy_dt(diffusion_coeff / s.a.minCoeff(), h, config);
    };

    std::vector<CoupledState> out;
    CoupledState s = state0;
    for (double t_out : output_times) {
        if (t_out < s.t) throw DomainError("reduced_flow", "evolve_coupled", "output times must be increasing");
        if (config.dt_policy == DtPolicy::Fixed) {
            while (t_out - s.t > 1e-12 * std::max(1.0, std::abs(t_out))) {
                const double dt = std::min(config.dt, t_out - s.t);
                if (dt > limit(s) * (1.0 + 1e-9)) {
                    throw CFLViolation("reduced_flow", "evolve_coupled",
                                       "dt = " + std::to_string(dt) + " exceeds " + std::to_string(limit(s)));
                }
                s = step(s, dt);
            }
        } else {
            // the step is re-planned on every stretch so a growing metric relaxes it
            while (t_out - s.t > 1e-12 * std::max(1.0, std::abs(t_out))) {
                const int steps = step_count(t_out - s.t, limit(s));
                const double dt = (t_out - s.t) / steps;
                const int chunk = std::min(steps, 64);
                const double start = s.t;
                for (int j = 0; j < chunk; ++j) {
                    s = step(s, dt);
                    s.t = start + (j + 1) * dt;
                }
            }
        }
        s.t = t_out;
        check(s);
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// checks on trajectories

double change_of_variables_residual(std::span<const CoupledState> traj, const FlowParams& params, const Grid1D& grid,
                                    std::span<const SamplePoint> samples) {
    const double sigma = derive_sigma(params.rho, params.m);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    const auto coeffs = unified_coefficients(params, zero);
    const double abar = 1.0 - coeffs.a;
    const double h = grid.step();
    const int nk = static_cast<int>(traj.size());

    auto u_at = [&](int k, int i) {
        const double f = traj[static_cast<std::size_t>(k)].f[i];
        if (!(f > 0.0 || (f == 0.0 && sigma > 0.0))) {
            throw PositivityError("reduced_flow", "change_of_variables_residual", "f must be positive");
        }
        return std::pow(f, 1.0 / sigma);
    };
    auto d1 = [h](double wm2, double wm1, double wp1, double wp2) {
        return (wm2 - 8.0 * wm1 + 8.0 * wp1 - wp2) / (12.0 * h);
    };
    auto d2 = [h](double wm2, double wm1, double w0, double wp1, double wp2) {
        return (-wm2 + 16.0 * wm1 - 30.0 * w0 + 16.0 * wp1 - wp2) / (12.0 * h * h);
    };

    double worst = 0.0;
    for (const auto& sp : samples) {
        const int k = sp.time_index, i = sp.node;
        if (k < 1 || k + 1 >= nk || i < 2 || i + 2 >= grid.npts) {
            throw DomainError("reduced_flow", "change_of_variables_residual",
                              "sample needs neighbouring records in time and two nodes on each side");
        }
        const auto& s = traj[static_cast<std::size_t>(k)];
        const double u = u_at(k, i);
        const double ux = d1(u_at(k, i - 2), u_at(k, i - 1), u_at(k, i + 1), u_at(k, i + 2));
        const double uxx = d2(u_at(k, i - 2), u_at(k, i - 1), u, u_at(k, i + 1), u_at(k, i + 2));
        const double ax = d1(s.a[i - 2], s.a[i - 1], s.a[i + 1], s.a[i + 2]);
        const double phix = d1(s.phi[i - 2], s.phi[i - 1], s.phi[i + 1], s.phi[i + 2]);
        const double a = s.a[i];
        const double lap = (uxx - ax / (2.0 * a) * ux) / a;
        const double ut = (u_at(k + 1, i) - u_at(k - 1, i)) /
                          (traj[static_cast<std::size_t>(k + 1)].t - traj[static_cast<std::size_t>(k - 1)].t);
        double rhs = abar * lap - phix * ux / a;
        if (coeffs.c != 0.0) rhs += coeffs.c * std::pow(u, coeffs.alpha);
        worst = std::max(worst, std::abs(ut - rhs));
    }
    return worst;
}

double lift_drift(const FlowParams& params, double u, double phi) {
    if (!(u > 0.0)) throw PositivityError("reduced_flow", "lift_drift", "u must be positive");
    const double sigma = derive_sigma(params.rho, params.m);
    return (1.0 - 2.0 * params.m * params.rho) * params.m * sigma * std::log(u) + phi;
}

}  // namespace rbflow
