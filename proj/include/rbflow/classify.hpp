#pragma once

#include <limits>
#include <span>
#include <vector>

#include "rbflow/ansatz.hpp"
#include "rbflow/hamilton.hpp"

namespace rbflow {

struct TypeSample {
    double t = 0.0;
    double kmax = 0.0;
};

/// Maximal time T of the solution; infinite for immortal ones.
struct Horizon {
    double T = std::numeric_limits<double>::infinity();
    bool finite() const { return T < std::numeric_limits<double>::infinity(); }
};

struct Thresholds {
    double exponent_tol = 0.1;  // tolerance on the fitted log-log exponent
    double fit_rms_max = 0.25;  // log-space rms residual above which the fit is ambiguous
    int min_samples = 8;
    double decades = 2.0;        // span of t needed on an infinite horizon
    double horizon_frac = 0.01;  // distance to T needed on a finite horizon, relative to T - t_first
};

struct Classification {
    HamiltonType label = HamiltonType::Undetermined;
    double exponent = 0.0;  // fitted growth exponent of (T - t) K or t K
    double sup_stat = 0.0;  // max of (T - t) K or t K over the samples
    double fit_rms = 0.0;
    Horizon horizon;
};

/// Spatial grid resolution used when the scenario is not homothetic.
inline constexpr int kKmaxGridPoints = 41;

/// K_max(t) over the scenario's spatial window. Homothetic scenarios use
/// K_0 / a(t). Throws IncompleteScenario and DomainError.
std::vector<TypeSample> kmax_profile(const Scenario& scenario, std::span<const double> t_samples);

/// Throws InsufficientSamples when the samples cannot support a decision.
Classification classify(const Horizon& horizon, std::span<const TypeSample> samples, const Thresholds& th = {});

/// Maximal forward time of a catalog scenario.
Horizon scenario_horizon(const Scenario& scenario);

/// Sample times used to classify a scenario: log-spaced over [1, 1000] for an
/// infinite horizon, geometric approach to T otherwise.
std::vector<double> classification_times(const Horizon& horizon, int count = 40);

}  // namespace rbflow
