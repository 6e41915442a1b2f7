#include "rbflow/classify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbflow/errors.hpp"

namespace rbflow {

namespace {

struct LineFit {
    double slope = 0.0;
    double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = x[static_cast<std::size_t>(i)];
        rhs[i] = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd resid = design * coef - rhs;
    return {coef[1], std::sqrt(resid.squaredNorm() / static_cast<double>(n))};
}

}  // namespace

std::vector<TypeSample> kmax_profile(const Scenario& scenario, std::span<const double> t_samples) {
    if (!scenario.complete) {
        throw IncompleteScenario("classify", "kmax_profile",
                                 scenario.name + " is not complete; its curvature supremum is not meaningful");
    }
    for (double t : t_samples) {
        if (!scenario.time_domain.contains(t)) {
            throw DomainError("classify", "kmax_profile", "t = " + std::to_string(t) + " outside the time domain");
        }
    }
    const Eigen::VectorXd coords =
        Eigen::VectorXd::LinSpaced(kKmaxGridPoints, scenario.spatial_window.lo, scenario.spatial_window.hi);
    auto grid_max = [&](double t) {
        double k = 0.0;
        for (Eigen::Index i = 0; i < coords.size(); ++i) {
            k = std::max(k, scenario.riemann_norm(scenario.point_at(coords[i]), t));
        }
        return k;
    };
    const bool unperturbed = scenario.perturbation.warp_scale == 1.0 && scenario.perturbation.rate_scale == 1.0;
    std::vector<TypeSample> out;
    out.reserve(t_samples.size());
    if (scenario.homothetic && unperturbed && scenario.time_domain.contains(0.0)) {
        const double k0 = grid_max(0.0);
        for (double t : t_samples) out.push_back({t, k0 / scenario.constants.base_factor(t)});
    } else {
        for (double t : t_samples) out.push_back({t, grid_max(t)});
    }
    return out;
}

Classification classify(const Horizon& horizon, std::span<const TypeSample> samples, const Thresholds& th) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].kmax >= 0.0)) throw DomainError("classify", "classify", "kmax must be nonnegative");
        if (i > 0 && !(samples[i].t > samples[i - 1].t)) {
            throw DomainError("classify", "classify", "sample times must increase strictly");
        }
    }
    Classification out;
    out.horizon = horizon;
    std::vector<double> x, y;
    if (horizon.finite()) {
        for (const auto& s : samples) {
            if (!(s.t < horizon.T)) throw DomainError("classify", "classify", "sample at or beyond the horizon");
        }
        if (static_cast<int>(samples.size()) < th.min_samples) {
            throw InsufficientSamples("classify", "classify", "need at least " + std::to_string(th.min_samples) +
                                                                  " samples");
        }
        const double first = horizon.T - samples.front().t, last = horizon.T - samples.back().t;
        if (last > th.horizon_frac * first) {
            throw InsufficientSamples("classify", "classify", "samples stop short of the horizon");
        }
        for (const auto& s : samples) {
            const double gap = horizon.T - s.t;
            out.sup_stat = std::max(out.sup_stat, gap * s.kmax);
            x.push_back(std::log(gap));
            y.push_back(std::log(gap * s.kmax));
        }
    } else {
        std::vector<TypeSample> positive;
        for (const auto& s : samples)
            if (s.t > 0.0) positive.push_back(s);
        if (static_cast<int>(positive.size()) < th.min_samples) {
            throw InsufficientSamples("classify", "classify", "need at least " + std::to_string(th.min_samples) +
                                                                  " samples at t > 0");
        }
        if (positive.back().t / positive.front().t < std::pow(10.0, th.decades)) {
            throw InsufficientSamples("classify", "classify", "samples span less than the required decades of t");
        }
        for (const auto& s : positive) {
            out.sup_stat = std::max(out.sup_stat, s.t * s.kmax);
            x.push_back(std::log(s.t));
            y.push_back(std::log(s.t * s.kmax));
        }
    }
    for (double v : y) {
        if (!std::isfinite(v)) return out;  // vanishing curvature somewhere: no growth law to fit
    }
    const LineFit fit = fit_line(x, y);
    out.fit_rms = fit.rms;
    if (fit.rms > th.fit_rms_max) return out;
    if (horizon.finite()) {
        // x = ln(T - t) decreases towards the horizon, so boundedness means a nonnegative slope
        out.exponent = fit.slope;
        out.label = fit.slope >= -th.exponent_tol ? HamiltonType::TypeI : HamiltonType::TypeIIa;
    } else {
        out.exponent = fit.slope;
        out.label = fit.slope <= th.exponent_tol ? HamiltonType::TypeIII : HamiltonType::TypeIIb;
    }
    return out;
}

Horizon scenario_horizon(const Scenario& scenario) { return {scenario.time_domain.hi}; }

std::vector<double> classification_times(const Horizon& horizon, int count) {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        const double frac = static_cast<double>(j) / (count - 1);
        t[static_cast<std::size_t>(j)] =
            horizon.finite() ? horizon.T * (1.0 - std::pow(10.0, -3.0 * frac)) : std::pow(10.0, 3.0 * frac);
    }
    return t;
}

}  // namespace rbflow
