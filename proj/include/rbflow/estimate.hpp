#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rbflow {

/// Backward windows [t0 - T, t0] serve ancient and eternal solutions, forward
/// windows [t0, t0 + T] immortal ones.
enum class TimeMode { Backward, Forward };

struct EstimateParams {
    double p = 1.0;
    double q = 1.0;
    double delta = 1.0;
    double D = 1.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double R = 2.0;
    double T = 1.0;
    double t0 = 0.0;
    double tau = 0.0; // cut-off time reaches 1 here; in (t0 - T, t0] (mirrored for forward mode)
    double a_coeff = 0.0;
    TimeMode mode = TimeMode::Backward;
    std::optional<double> C_report;

    /// Throws ConfigError for R < 2, negative k1/k2, nonpositive p, T, delta,
    /// D or an out-of-range tau, and NonParabolic for a_coeff >= 1.
    void validate() const;

    double abar() const { return 1.0 - a_coeff; }
    /// Elapsed time from the start of the window: t - t0 + T, or t0 + T - t forward.
    double elapsed(double t) const;
    bool in_window(double t) const;
};

// ---------------------------------------------------------------------------
// h = p ln u and G = |grad h|^2 / (q - h)^2

struct LogTransform {
    Eigen::VectorXd h;
    Eigen::VectorXd G;
};

/// Grid version on a line with metric metric(x) dx^2; fourth-order derivatives.
/// Throws DeltaViolation when q - h < delta at some node.
LogTransform log_transform(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& metric,
                           double step, double p, double q, double delta);

/// Pointwise version from u and |grad u|^2.
std::pair<double, double> log_transform(double u, double grad_u_sq, double p, double q, double delta);

// ---------------------------------------------------------------------------
// cut-off

struct CutoffValue {
    double value = 0.0;
    double dr = 0.0;
    double drr = 0.0;
    double dt = 0.0;
};

/// Product eta(r) zeta(t): eta = 1 on [0, R/2] and 0 beyond R, zeta = 0 at the
/// start of the window and 1 from tau on. Both transitions use the degree-9
/// polynomial that is C^4 at its ends.
CutoffValue cutoff(double r, double t, const EstimateParams& ep);

/// Transition polynomial s^5 (126 - 420 s + 540 s^2 - 315 s^3 + 70 s^4) on [0, 1] with two derivatives.
std::array<double, 3> transition(double s);

struct CutoffProperties {
    bool range_ok = false;       // (a) values in [0, 1], zero for r >= R
    bool plateau_ok = false;     // (b) value 1 and dr = 0 on [0, R/2] x [tau, t0]
    bool start_ok = false;       // (c) value 0 at the start of the window
    bool monotone_ok = false;    // (d) dr <= 0
    double C_time = 0.0;         // sup |dt| (elapsed(tau)) / value^{1/2}
    double C_first = 0.0;        // sup |dr| R / value^eps
    double C_second = 0.0;       // sup |drr| R^2 / value^eps
    double epsilon = 0.5;
    bool all_ok() const;
};

/// Measures the cut-off properties on an nr x nt grid over [0, 1.5 R] times the window.
CutoffProperties cutoff_properties(const EstimateParams& ep, int nr = 200, int nt = 50, double epsilon = 0.5);

// ---------------------------------------------------------------------------
// Gamma and the comparison inequality on model geometries

/// Radial model: flat R^n, hyperbolic space of curvature -kappa^2, or a line.
struct RadialModel {
    enum class Kind { Flat, Hyperbolic, Line };
    Kind kind = Kind::Flat;
    int n = 2;
    double kappa = 1.0;

    /// Laplacian of the distance function at radius r.
    double laplacian_r(double r) const;
};

/// The drift phi (not divided by 1 - a): none, a function of the distance,
/// or slope * ln x_n on the upper half space model of hyperbolic space.
struct Drift {
    enum class Kind { None, Radial, Busemann };
    Kind kind = Kind::None;
    std::function<double(double)> d_phi;  // radial: d phi / dr
    std::function<double(double)> dd_phi; // radial: d^2 phi / dr^2
    double slope = 0.0;                   // Busemann coefficient

    static Drift none() { return {}; }
    static Drift radial(std::function<double(double)> d_phi, std::function<double(double)> dd_phi);
    static Drift busemann(double slope);
};

/// Sup over directions of the drifted Laplacian of r at radius r, with phi_bar = phi / (1 - a).
double drifted_laplacian_r(const RadialModel& model, const Drift& drift, double a_coeff, double r);

/// Gamma = max over the unit sphere of Delta r - d phi_bar / dr. Throws
/// UnsupportedModel for drifts the model cannot carry.
double gamma_bar(const RadialModel& model, const Drift& drift, double a_coeff);

/// Smallest eigenvalue of Ric + Hess phi_bar relative to the metric at radius r.
double bakry_emery_min(const RadialModel& model, const Drift& drift, double a_coeff, double r);

/// min over radii of Gamma + (R - 1) k1 / abar - Delta_phi_bar r. Throws
/// HypothesisViolation when Ric + Hess phi_bar >= -(k1 / abar) g fails at a radius.
double comparison_check(const RadialModel& model, const Drift& drift, double a_coeff, double k1, double R,
                        std::span<const double> radii);

// ---------------------------------------------------------------------------
// bracket of the estimate

struct BracketInputs {
    double t = 0.0;
    double u = 1.0;          // u at the evaluation point
    double b_sup = 0.0;      // sup of b over the region
    double grad_b_sup = 0.0; // sup |grad b|
    double c = 0.0;
    double alpha = 0.0;
    double u_min = 1.0; // range of u over the region
    double u_max = 1.0;
    double gamma = 0.0;
};

struct BracketTerms {
    double k1 = 0.0, k2 = 0.0, radius = 0.0, time = 0.0, gamma = 0.0, b = 0.0, grad_b = 0.0, nonlinear = 0.0;
    double sum() const { return k1 + k2 + radius + time + gamma + b + grad_b + nonlinear; }
};

struct Bracket {
    double bracket = 0.0;
    double factor = 0.0; // q - p ln u at the point
    BracketTerms terms;
};

/// Throws DeltaViolation when q - p ln u < delta at the point or at the ends of the u range.
Bracket bound_bracket(const EstimateParams& ep, const BracketInputs& in);

/// The supremum inside the nonlinear term, sup over u in [u_min, u_max] of
/// [(alpha - 1 + p / (q - p ln u)) c]^+; monotone in u so attained at an end.
double nonlinear_positive_part(const EstimateParams& ep, double c, double alpha, double u_min, double u_max);

// ---------------------------------------------------------------------------
// empirical verification

/// One space-time sample: distance r from the base point under g(t), u, |grad ln u|, b and |grad b|.
struct FieldSample {
    double t = 0.0;
    double r = 0.0;
    double u = 1.0;
    double grad_log_u = 0.0;
    double b = 0.0;
    double grad_b = 0.0;
};

struct EstimateReport {
    double sup_ratio = 0.0;
    FieldSample argmax;
    Bracket at_argmax;
    int samples_used = 0;
    std::vector<double> ratios; // per input sample; NaN where skipped
};

/// sup over samples in Q_{R/2,T} of |grad ln u| / (factor * bracket). Samples
/// outside Q_{R/2,T} or at the opening time of the window are skipped.
EstimateReport verify_estimate(std::span<const FieldSample> samples, const EstimateParams& ep, double gamma, double c,
                               double alpha);

/// Pointwise lower bounds of (1 - a) Ric + Hess phi and of d/dt g relative to g.
struct HypothesisSample {
    double t = 0.0;
    double r = 0.0;
    double ricci_phi_min = 0.0;
    double dt_metric_min = 0.0;
};

inline constexpr double kHypothesisTolerance = 1e-8;

/// Throws HypothesisViolation when a sample breaks (1 - a) Ric + Hess phi >= -k1 g or d/dt g >= -2 k2 g.
void check_hypotheses(std::span<const HypothesisSample> samples, const EstimateParams& ep);

// ---------------------------------------------------------------------------
// evolution identity of G on a line

/// u and the metric factor at three time levels t - dt, t, t + dt on one grid.
struct ThreeLevels {
    std::array<Eigen::VectorXd, 3> u;
    std::array<Eigen::VectorXd, 3> metric;
    Eigen::VectorXd phi; // time independent
    double step = 0.0;
    double dt = 0.0;
};

struct IdentityParams {
    double p = 1.0;
    double q = 1.0;
    double abar = 1.0; // 1 - a
    double c = 0.0;
    double alpha = 0.0;
};

struct IdentityTerms {
    double lhs = 0.0;
    double hessian_square = 0.0;
    double grad_g_plus = 0.0;
    double grad_g_minus = 0.0;
    double metric_ricci = 0.0;
    double grad_b = 0.0;
    double b = 0.0;
    double nonlinear = 0.0;
    double quartic = 0.0;
    double rhs() const {
        return hessian_square + grad_g_plus + grad_g_minus + metric_ricci + grad_b + b + nonlinear + quartic;
    }
    double residual() const;
};

/// Both sides of the evolution identity of G at an interior node of the middle
/// level, with b manufactured so that u solves its equation exactly. Second-order
/// differences in space and time; needs two nodes on each side.
IdentityTerms evolution_identity(const ThreeLevels& data, const IdentityParams& ip, int node);

/// |LHS - RHS| of the identity.
double evolution_identity_residual(const ThreeLevels& data, const IdentityParams& ip, int node);

}  // namespace rbflow
