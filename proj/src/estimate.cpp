#include "rbflow/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rbflow/errors.hpp"
#include "rbflow/profile.hpp"

namespace rbflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void EstimateParams::validate() const {
    if (!(p > 0.0)) throw ConfigError("estimate", "EstimateParams", "p must be positive");
    if (!(delta > 0.0)) throw ConfigError("estimate", "EstimateParams", "delta must be positive");
    if (!(D > 0.0)) throw ConfigError("estimate", "EstimateParams", "D must be positive");
    if (!(T > 0.0)) throw ConfigError("estimate", "EstimateParams", "T must be positive");
    if (!(R >= 2.0)) throw ConfigError("estimate", "EstimateParams", "R must be at least 2, got " + num(R));
    if (k1 < 0.0 || k2 < 0.0) throw ConfigError("estimate", "EstimateParams", "k1 and k2 must be nonnegative");
    if (!(tau > t0 - T && tau <= t0)) {
        throw ConfigError("estimate", "EstimateParams", "tau must lie in (t0 - T, t0], got " + num(tau));
    }
    if (!(a_coeff < 1.0)) {
        throw NonParabolic("estimate", "EstimateParams", "a = " + num(a_coeff) + " leaves no diffusion");
    }
}

double EstimateParams::elapsed(double t) const { return mode == TimeMode::Backward ? t - t0 + T : t0 + T - t; }

bool EstimateParams::in_window(double t) const {
    return mode == TimeMode::Backward ? (t >= t0 - T && t <= t0) : (t >= t0 && t <= t0 + T);
}

// ---------------------------------------------------------------------------

LogTransform log_transform(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& metric,
                           double step, double p, double q, double delta) {
    if (metric.size() != u.size()) throw DomainError("estimate", "log_transform", "metric size differs from u");
    if ((u.array() <= 0.0).any()) throw PositivityError("estimate", "log_transform", "u must be positive");
    LogTransform out;
    out.h = p * u.array().log();
    const Eigen::ArrayXd gap = q - out.h.array();
    for (Eigen::Index i = 0; i < gap.size(); ++i) {
        if (gap[i] < delta) {
            throw DeltaViolation("estimate", "log_transform",
                                 "q - h = " + num(gap[i]) + " < delta = " + num(delta) + " at node " + std::to_string(i));
        }
    }
    Eigen::VectorXd d1, d2;
    fd4_derivatives(out.h, step, d1, d2);
    out.G = d1.array().square() / (metric.array() * gap.square());
    return out;
}

std::pair<double, double> log_transform(double u, double grad_u_sq, double p, double q, double delta) {
    if (!(u > 0.0)) throw PositivityError("estimate", "log_transform", "u must be positive");
    const double h = p * std::log(u);
    if (q - h < delta) {
        throw DeltaViolation("estimate", "log_transform", "q - h = " + num(q - h) + " < delta = " + num(delta));
    }
    return {h, p * p * grad_u_sq / (u * u) / ((q - h) * (q - h))};
}

// ---------------------------------------------------------------------------
// cut-off

std::array<double, 3> transition(double s) {
    if (s <= 0.0) return {0.0, 0.0, 0.0};
    if (s >= 1.0) return {1.0, 0.0, 0.0};
    const double s2 = s * s, s3 = s2 * s, w = 1.0 - s;
    const double value = s2 * s3 * (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + 70.0 * s))));
    const double d1 = 630.0 * s2 * s2 * w * w * w * w;
    const double d2 = 2520.0 * s3 * w * w * w * (1.0 - 2.0 * s);
    return {value, d1, d2};
}

CutoffValue cutoff(double r, double t, const EstimateParams& ep) {
    if (r < 0.0) throw DomainError("estimate", "cutoff", "r must be nonnegative");
    const double half = 0.5 * ep.R;
    double eta = 1.0, eta_r = 0.0, eta_rr = 0.0;
    if (r >= ep.R) {
        eta = 0.0;
    } else if (r > half) {
        const auto s = transition((r - half) / half);
        eta = 1.0 - s[0];
        eta_r = -s[1] / half;
        eta_rr = -s[2] / (half * half);
    }
    // forward windows are the mirror image of backward ones about t0
    const double sign = ep.mode == TimeMode::Backward ? 1.0 : -1.0;
    const double reflected = ep.mode == TimeMode::Backward ? t : 2.0 * ep.t0 - t;
    const double start = ep.t0 - ep.T;
    const double ramp = ep.tau - start;
    const auto z = transition((reflected - start) / ramp);
    const double zeta = z[0];
    const double zeta_t = sign * z[1] / ramp;
    return {eta * zeta, eta_r * zeta, eta_rr * zeta, eta * zeta_t};
}

bool CutoffProperties::all_ok() const {
    return range_ok && plateau_ok && start_ok && monotone_ok && std::isfinite(C_time) && std::isfinite(C_first) &&
           std::isfinite(C_second);
}

CutoffProperties cutoff_properties(const EstimateParams& ep, int nr, int nt, double epsilon) {
    ep.validate();
    if (nr < 2 || nt < 2) throw DomainError("estimate", "cutoff_properties", "grid needs at least 2 x 2 points");
    CutoffProperties out;
    out.epsilon = epsilon;
    out.range_ok = out.plateau_ok = out.start_ok = out.monotone_ok = true;
    const double ramp = ep.tau - (ep.t0 - ep.T);
    const double tol = 1e-14;
    for (int j = 0; j < nt; ++j) {
        const double frac = static_cast<double>(j) / (nt - 1);
        const double t = ep.mode == TimeMode::Backward ? ep.t0 - ep.T + frac * ep.T : ep.t0 + ep.T - frac * ep.T;
        const double reflected = ep.mode == TimeMode::Backward ? t : 2.0 * ep.t0 - t;
        for (int i = 0; i < nr; ++i) {
            const double r = 1.5 * ep.R * i / (nr - 1);
            const auto c = cutoff(r, t, ep);
            if (c.value < 0.0 || c.value > 1.0 || (r >= ep.R && c.value != 0.0)) out.range_ok = false;
            if (r <= 0.5 * ep.R && reflected >= ep.tau && (std::abs(c.value - 1.0) > tol || c.dr != 0.0)) {
                out.plateau_ok = false;
            }
            if (j == 0 && c.value != 0.0) out.start_ok = false;
            if (c.dr > 0.0) out.monotone_ok = false;
            if (c.value > 0.0) {
                out.C_time = std::max(out.C_time, std::abs(c.dt) * ramp / std::sqrt(c.value));
                const double pe = std::pow(c.value, epsilon);
                out.C_first = std::max(out.C_first, std::abs(c.dr) * ep.R / pe);
                out.C_second = std::max(out.C_second, std::abs(c.drr) * ep.R * ep.R / pe);
            } else if (c.dt != 0.0 || c.dr != 0.0 || c.drr != 0.0) {
                out.C_time = out.C_first = out.C_second = kInf;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// model geometries

double RadialModel::laplacian_r(double r) const {
    if (!(r > 0.0)) throw DomainError("estimate", "laplacian_r", "r must be positive");
    switch (kind) {
        case Kind::Flat: return (n - 1.0) / r;
        case Kind::Hyperbolic: return (n - 1.0) * kappa / std::tanh(kappa * r);
        case Kind::Line: return 0.0;
    }
    return 0.0;
}

Drift Drift::radial(std::function<double(double)> d_phi, std::function<double(double)> dd_phi) {
    Drift d;
    d.kind = Kind::Radial;
    d.d_phi = std::move(d_phi);
    d.dd_phi = std::move(dd_phi);
    return d;
}

Drift Drift::busemann(double slope) {
    Drift d;
    d.kind = Kind::Busemann;
    d.slope = slope;
    return d;
}

namespace {

double abar_of(double a_coeff, const char* op) {
    if (!(a_coeff < 1.0)) throw NonParabolic("estimate", op, "1 - a must be positive");
    return 1.0 - a_coeff;
}

void check_model(const RadialModel& model, const Drift& drift, const char* op) {
    if (model.kind == RadialModel::Kind::Line && model.n != 1) {
        throw UnsupportedModel("estimate", op, "line model must have n = 1");
    }
    if (model.kind != RadialModel::Kind::Line && model.n < 2) {
        throw UnsupportedModel("estimate", op, "flat and hyperbolic models need n >= 2");
    }
    if (drift.kind == Drift::Kind::Busemann && model.kind != RadialModel::Kind::Hyperbolic) {
        throw UnsupportedModel("estimate", op, "a Busemann drift needs the hyperbolic model");
    }
    if (drift.kind == Drift::Kind::Radial && (!drift.d_phi || !drift.dd_phi)) {
        throw UnsupportedModel("estimate", op, "radial drift needs both derivatives");
    }
}

}  // namespace

double drifted_laplacian_r(const RadialModel& model, const Drift& drift, double a_coeff, double r) {
    check_model(model, drift, "drifted_laplacian_r");
    const double abar = abar_of(a_coeff, "drifted_laplacian_r");
    const double lap = model.laplacian_r(r);
    switch (drift.kind) {
        case Drift::Kind::None: return lap;
        case Drift::Kind::Radial: return lap - drift.d_phi(r) / abar;
        case Drift::Kind::Busemann: return lap + std::abs(drift.slope) * model.kappa / abar;
    }
    return lap;
}

double gamma_bar(const RadialModel& model, const Drift& drift, double a_coeff) {
    return drifted_laplacian_r(model, drift, a_coeff, 1.0);
}

double bakry_emery_min(const RadialModel& model, const Drift& drift, double a_coeff, double r) {
    check_model(model, drift, "bakry_emery_min");
    const double abar = abar_of(a_coeff, "bakry_emery_min");
    const double ric = model.kind == RadialModel::Kind::Hyperbolic ? -(model.n - 1.0) * model.kappa * model.kappa : 0.0;
    double hess = 0.0;
    switch (drift.kind) {
        case Drift::Kind::None: break;
        case Drift::Kind::Radial: {
            hess = drift.dd_phi(r) / abar;
            if (model.n >= 2) {
                const double tangential = drift.d_phi(r) / abar * model.laplacian_r(r) / (model.n - 1.0);
                hess = std::min(hess, tangential);
            }
            break;
        }
        case Drift::Kind::Busemann:
            hess = std::min(0.0, -drift.slope * model.kappa * model.kappa / abar);
            break;
    }
    return ric + hess;
}

double comparison_check(const RadialModel& model, const Drift& drift, double a_coeff, double k1, double R,
                        std::span<const double> radii) {
    const double abar = abar_of(a_coeff, "comparison_check");
    const double gamma = gamma_bar(model, drift, a_coeff);
    double worst = kInf;
    for (double r : radii) {
        if (r < 1.0 || r > R) throw DomainError("estimate", "comparison_check", "radii must lie in [1, R]");
        const double lower = bakry_emery_min(model, drift, a_coeff, r);
        if (lower < -k1 / abar - kHypothesisTolerance) {
            throw HypothesisViolation("estimate", "comparison_check",
                                      "Ric + Hess phi_bar = " + num(lower) + " below -k1/abar = " + num(-k1 / abar) +
                                          " at r = " + num(r));
        }
        worst = std::min(worst, gamma + (R - 1.0) * k1 / abar - drifted_laplacian_r(model, drift, a_coeff, r));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// bracket

double nonlinear_positive_part(const EstimateParams& ep, double c, double alpha, double u_min, double u_max) {
    auto g = [&](double u) { return (alpha - 1.0 + ep.p / (ep.q - ep.p * std::log(u))) * c; };
    return std::max(0.0, std::max(g(u_min), g(u_max)));
}

Bracket bound_bracket(const EstimateParams& ep, const BracketInputs& in) {
    ep.validate();
    auto factor_at = [&](double u) {
        if (!(u > 0.0)) throw PositivityError("estimate", "bound_bracket", "u must be positive");
        const double f = ep.q - ep.p * std::log(u);
        if (f < ep.delta) {
            throw DeltaViolation("estimate", "bound_bracket",
                                 "q - p ln u = " + num(f) + " < delta = " + num(ep.delta) + " at u = " + num(u));
        }
        return f;
    };
    if (in.u_min > in.u_max) throw DomainError("estimate", "bound_bracket", "empty u range");
    factor_at(in.u_min);
    factor_at(in.u_max);
    const double elapsed = ep.elapsed(in.t);
    if (!(elapsed > 0.0) || !ep.in_window(in.t)) {
        throw DomainError("estimate", "bound_bracket", "t = " + num(in.t) + " is not inside the time window");
    }

    Bracket out;
    out.factor = factor_at(in.u);
    auto& tm = out.terms;
    tm.k1 = std::sqrt(ep.k1);
    tm.k2 = std::sqrt(ep.k2);
    tm.radius = 1.0 / ep.R;
    tm.time = 1.0 / std::sqrt(elapsed);
    tm.gamma = std::sqrt(std::max(in.gamma, 0.0)) / std::sqrt(ep.R);
    tm.b = std::sqrt(std::max(in.b_sup, 0.0));
    tm.grad_b = std::cbrt(std::max(in.grad_b_sup, 0.0));
    const double positive = nonlinear_positive_part(ep, in.c, in.alpha, in.u_min, in.u_max);
    if (positive > 0.0) {
        const double e = 0.5 * (in.alpha - 1.0);
        tm.nonlinear = std::sqrt(positive) * std::max(std::pow(in.u_min, e), std::pow(in.u_max, e));
    }
    out.bracket = tm.sum();
    return out;
}

// ---------------------------------------------------------------------------
// verification

EstimateReport verify_estimate(std::span<const FieldSample> samples, const EstimateParams& ep, double gamma, double c,
                               double alpha) {
    ep.validate();
    std::vector<const FieldSample*> used;
    for (const auto& s : samples) {
        if (s.r <= 0.5 * ep.R && ep.in_window(s.t) && ep.elapsed(s.t) > 0.0) used.push_back(&s);
    }
    EstimateReport report;
    report.ratios.assign(samples.size(), std::numeric_limits<double>::quiet_NaN());
    report.samples_used = static_cast<int>(used.size());
    if (used.empty()) return report;

    BracketInputs in;
    in.c = c;
    in.alpha = alpha;
    in.gamma = gamma;
    in.u_min = kInf;
    in.u_max = -kInf;
    in.b_sup = -kInf;
    for (const auto* s : used) {
        in.u_min = std::min(in.u_min, s->u);
        in.u_max = std::max(in.u_max, s->u);
        in.b_sup = std::max(in.b_sup, s->b);
        in.grad_b_sup = std::max(in.grad_b_sup, std::abs(s->grad_b));
    }
    if (in.u_max > ep.D * (1.0 + 1e-12)) {
        throw HypothesisViolation("estimate", "verify_estimate",
                                  "u reaches " + num(in.u_max) + " above the bound D = " + num(ep.D));
    }
    report.sup_ratio = -1.0;
    for (const auto* s : used) {
        in.t = s->t;
        in.u = s->u;
        const Bracket b = bound_bracket(ep, in);
        const double ratio = std::abs(s->grad_log_u) / (b.factor * b.bracket);
        report.ratios[static_cast<std::size_t>(s - samples.data())] = ratio;
        if (ratio > report.sup_ratio) {
            report.sup_ratio = ratio;
            report.argmax = *s;
            report.at_argmax = b;
        }
    }
    return report;
}

void check_hypotheses(std::span<const HypothesisSample> samples, const EstimateParams& ep) {
    for (const auto& s : samples) {
        if (s.ricci_phi_min < -ep.k1 - kHypothesisTolerance) {
            throw HypothesisViolation("estimate", "check_hypotheses",
                                      "(1-a)Ric + Hess phi = " + num(s.ricci_phi_min) + " below -k1 at t = " +
                                          num(s.t) + ", r = " + num(s.r));
        }
        if (s.dt_metric_min < -2.0 * ep.k2 - kHypothesisTolerance) {
            throw HypothesisViolation("estimate", "check_hypotheses",
                                      "d/dt g = " + num(s.dt_metric_min) + " below -2 k2 at t = " + num(s.t) +
                                          ", r = " + num(s.r));
        }
    }
}

// ---------------------------------------------------------------------------
// evolution identity

double IdentityTerms::residual() const { return std::abs(lhs - rhs()); }

IdentityTerms evolution_identity(const ThreeLevels& d, const IdentityParams& ip, int i) {
    const Eigen::Index n = d.phi.size();
    for (int k = 0; k < 3; ++k) {
        if (d.u[k].size() != n || d.metric[k].size() != n) {
            throw DomainError("estimate", "evolution_identity", "levels and drift must share one grid");
        }
    }
    if (i < 2 || i + 2 >= n) throw DomainError("estimate", "evolution_identity", "node needs two neighbours per side");
    if (!(d.step > 0.0 && d.dt > 0.0)) throw DomainError("estimate", "evolution_identity", "steps must be positive");
    const double hs = d.step;
    auto D1 = [hs](const Eigen::VectorXd& w, Eigen::Index j) { return (w[j + 1] - w[j - 1]) / (2.0 * hs); };
    auto D2 = [hs](const Eigen::VectorXd& w, Eigen::Index j) {
        return (w[j + 1] - 2.0 * w[j] + w[j - 1]) / (hs * hs);
    };

    std::array<Eigen::VectorXd, 3> h;
    for (int k = 0; k < 3; ++k) {
        if ((d.u[k].array() <= 0.0).any()) throw PositivityError("estimate", "evolution_identity", "u must be positive");
        h[k] = ip.p * d.u[k].array().log();
        for (Eigen::Index j = i - 2; j <= i + 2; ++j) {
            if (!(ip.q - h[k][j] > 0.0)) throw DomainError("estimate", "evolution_identity", "q - h must be positive");
        }
    }
    auto G = [&](int k, Eigen::Index j) {
        const double hx = D1(h[k], j);
        const double gap = ip.q - h[k][j];
        return hx * hx / (d.metric[k][j] * gap * gap);
    };
    const auto& A = d.metric[1];
    auto gamma = [&](Eigen::Index j) { return D1(A, j) / (2.0 * A[j]); };

    // b manufactured from the equation u_t = abar Delta u - <grad phi, grad u> + b u + c u^alpha
    auto b_at = [&](Eigen::Index j) {
        const double ut = (d.u[2][j] - d.u[0][j]) / (2.0 * d.dt);
        const double ux = D1(d.u[1], j);
        const double lap = (D2(d.u[1], j) - gamma(j) * ux) / A[j];
        const double drift = D1(d.phi, j) * ux / A[j];
        return (ut - (ip.abar * lap - drift + ip.c * std::pow(d.u[1][j], ip.alpha))) / d.u[1][j];
    };

    const double a = A[i], gam = gamma(i);
    const double g_m = G(1, i - 1), g_0 = G(1, i), g_p = G(1, i + 1);
    const double gx = (g_p - g_m) / (2.0 * hs);
    const double gxx = (g_p - 2.0 * g_0 + g_m) / (hs * hs);
    const double gt = (G(2, i) - G(0, i)) / (2.0 * d.dt);
    const double phix = D1(d.phi, i), phixx = D2(d.phi, i);
    const double at = (d.metric[2][i] - d.metric[0][i]) / (2.0 * d.dt);
    const double hx = D1(h[1], i), hxx = D2(h[1], i);
    const double gap = ip.q - h[1][i];
    const double b = b_at(i);
    const double bx = (b_at(i + 1) - b_at(i - 1)) / (2.0 * hs);

    const double grad_h_sq = hx * hx / a;
    const double h_dot_g = hx * gx / a;
    const double t_sq = (hxx - gam * hx) / gap + hx * hx / (gap * gap);

    IdentityTerms out;
    out.lhs = ip.abar * (gxx - gam * gx) / a - phix * gx / a - gt;
    out.hessian_square = 2.0 * ip.abar * t_sq * t_sq / (a * a);
    out.grad_g_plus = 2.0 * ip.abar * h_dot_g / gap;
    out.grad_g_minus = -(2.0 * ip.abar / ip.p) * h_dot_g;
    out.metric_ricci = (at + 2.0 * (phixx - gam * phix)) * hx * hx / (a * a * gap * gap);
    out.grad_b = -2.0 * ip.p * (hx * bx / a) / (gap * gap);
    out.b = -2.0 * ip.p * b * grad_h_sq / (gap * gap * gap);
    out.nonlinear = -2.0 * ip.c * (ip.alpha - 1.0 + ip.p / gap) * std::exp(h[1][i] / ip.p * (ip.alpha - 1.0)) * g_0;
    out.quartic = (2.0 * ip.abar / ip.p) * grad_h_sq * grad_h_sq / (gap * gap * gap);
    return out;
}

double evolution_identity_residual(const ThreeLevels& data, const IdentityParams& ip, int node) {
    return evolution_identity(data, ip, node).residual();
}

}  // namespace rbflow
