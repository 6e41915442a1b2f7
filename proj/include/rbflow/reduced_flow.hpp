#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rbflow/params.hpp"

namespace rbflow {

/// Uniform grid x_i = x_lo + i h on [x_lo, x_hi].
struct Grid1D {
    double x_lo = 0.0;
    double x_hi = 1.0;
    int npts = 3;

    /// Throws DomainError for npts < 3 or an empty interval.
    static Grid1D make(double x_lo, double x_hi, int npts);

    double step() const { return (x_hi - x_lo) / (npts - 1); }
    double x(int i) const { return x_lo + i * step(); }
    Eigen::VectorXd nodes() const { return Eigen::VectorXd::LinSpaced(npts, x_lo, x_hi); }
};

enum class Integrator { ExplicitRK4, ExplicitEuler };
enum class DtPolicy { Fixed, Cfl };
enum class Boundary { DirichletFromExact, Neumann0 };

struct SolverConfig {
    Integrator integrator = Integrator::ExplicitRK4;
    DtPolicy dt_policy = DtPolicy::Cfl;
    double dt = 0.0;  // used with DtPolicy::Fixed
    double cfl = 0.4; // dt = cfl h^2 / max diffusion coefficient
    Boundary boundary = Boundary::DirichletFromExact;
    double u_floor = 1e-10;
    bool freeze_metric = false; // hold a(x) fixed in evolve_coupled

    /// Throws ConfigError unless cfl is in (0, 0.5] and the fixed step is positive.
    void validate() const;
};

/// Boundary values at time t for Dirichlet runs: (left, right).
using BoundaryFn = std::function<std::pair<double, double>(double t)>;

/// Data of the scalar problem u_t = Delta_phi u - a Delta u + b u + c u^alpha on
/// a line with metric metric(x) dx^2. An empty b means b = 0.
struct ScalarProblem {
    Grid1D grid;
    UnifiedCoefficients<double> coeffs;
    Eigen::VectorXd phi;
    Eigen::VectorXd metric;
    BoundaryFn boundary; // required for DirichletFromExact
};

/// Largest step allowed for the problem under the configured policy.
double max_stable_dt(const ScalarProblem& problem, const SolverConfig& config);

/// Right-hand side of the scalar equation at every node, second-order
/// differences; boundary rows follow the configured condition.
Eigen::VectorXd scalar_rhs(const ScalarProblem& problem, const Eigen::Ref<const Eigen::VectorXd>& u,
                           Boundary boundary);

/// One explicit step from t to t + dt. Throws NonParabolic, CFLViolation, FloorBreach.
Eigen::VectorXd step_scalar(const ScalarProblem& problem, const Eigen::Ref<const Eigen::VectorXd>& u, double t,
                            double dt, const SolverConfig& config);

struct ScalarTrajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> u;
};

/// Integrates from t0 and records u at each (increasing) output time.
ScalarTrajectory evolve_scalar(const ScalarProblem& problem, const Eigen::Ref<const Eigen::VectorXd>& u0, double t0,
                               std::span<const double> output_times, const SolverConfig& config);

/// Discrete base state of the coupled system: g = a dx^2, warping f, drift phi.
struct CoupledState {
    double t = 0.0;
    Eigen::VectorXd a;
    Eigen::VectorXd f;
    Eigen::VectorXd phi;
    std::string provenance;
};

/// Dirichlet data for the coupled system at time t: (a_left, a_right, f_left, f_right).
using CoupledBoundaryFn = std::function<std::array<double, 4>(double t)>;

struct CoupledRates {
    Eigen::VectorXd a_t;
    Eigen::VectorXd f_t;
};

/// Time derivatives of (a, f) for a one-dimensional base (Ric = 0, S = 0).
CoupledRates coupled_rhs(const CoupledState& state, const FlowParams& params, const Grid1D& grid);

/// Evolves the coupled base system; returns the states at the output times.
/// Positivity of a and f is enforced at evolved nodes (FloorBreach).
std::vector<CoupledState> evolve_coupled(const CoupledState& state0, const FlowParams& params, const Grid1D& grid,
                                         std::span<const double> output_times, const SolverConfig& config,
                                         const CoupledBoundaryFn& boundary = {});

/// Point of (time index, node) at which a residual is evaluated.
struct SamplePoint {
    int time_index = 1;
    int node = 1;
};

/// Max |u_t - (1 - a) Delta u + <grad phi, grad u> - b u - c u^alpha| for
/// u = f^{1/sigma} on a trajectory (b from the one-dimensional base, hence 0).
/// Space derivatives are fourth order, time derivatives centered between the
/// neighbouring records; every sample needs records on both sides.
double change_of_variables_residual(std::span<const CoupledState> trajectory, const FlowParams& params,
                                    const Grid1D& grid, std::span<const SamplePoint> samples);

/// psi = (1 - 2 m rho) m sigma ln u + phi. Throws PositivityError for u <= 0.
double lift_drift(const FlowParams& params, double u, double phi);

}  // namespace rbflow
