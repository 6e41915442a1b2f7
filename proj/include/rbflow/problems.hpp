#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rbflow/estimate.hpp"
#include "rbflow/reduced_flow.hpp"

namespace rbflow {

/// A one-dimensional base problem for evolve_coupled with its closed-form solution.
struct SimulationProblem {
    std::string name;
    FlowParams params;
    Grid1D grid;
    CoupledState initial;
    CoupledBoundaryFn boundary;
    bool freeze_metric = false;
    std::function<std::pair<double, double>(double x, double t)> exact; // (a, f)
};

/// heat-reduction: f_t = f_xx from sin x on [0, pi] with zero ends.
/// heat-offset: the same equation from 1 + sin x with ends pinned to 1.
/// cosh-einstein: the t = 0 slice of hyperbolic space as dr^2 + cosh^2 r g_H on [-2, 2].
SimulationProblem simulation_problem(const std::string& name, int npts, int total_dimension = 3);

std::vector<std::string> simulation_names();

/// Samples, constants and hypothesis samples for one run of verify_estimate.
struct EstimateSuite {
    std::string name;
    EstimateParams params;
    double gamma = 0.0;
    double c = 0.0;
    double alpha = 0.0;
    std::vector<FieldSample> samples;
    std::vector<HypothesisSample> hypotheses;
};

/// Positive heat solution 1 + e^{-t} sin x on [0, pi], base point pi/2, window [0, 1/2].
/// refine multiplies the number of grid intervals.
EstimateSuite heat_estimate_suite(double R, int refine = 1);

/// Closed-form hyperbolic-immortal solution on the forward window [0, 1/10],
/// sampled in geodesic polar coordinates about (0, 1).
EstimateSuite hyperbolic_estimate_suite(double R, int refine = 1);

EstimateSuite estimate_suite(const std::string& name, double R, int refine = 1);

/// Smooth synthetic data for the evolution identity at mesh level `level`
/// (h = 0.1 / 2^level on [-2, 2], dt = h) and nodes at x in {-1, -0.5, 0, 0.5, 1}.
struct IdentityCase {
    ThreeLevels data;
    IdentityParams params;
    std::vector<int> nodes;
};
IdentityCase synthetic_identity_case(int level, bool constant_u = false);

}  // namespace rbflow
