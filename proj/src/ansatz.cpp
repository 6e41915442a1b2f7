#include "rbflow/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rbflow/errors.hpp"

namespace rbflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Jet2 scale(const Jet2& j, double s) { return {s * j.v, s * j.d1, s * j.d2}; }

}  // namespace

// ---------------------------------------------------------------------------
// constants

AnsatzConstants AnsatzConstants::from_ratio(double c0, double c1_over_c2, double rho) {
    return {c0, c0 * c1_over_c2, rho};
}

double AnsatzConstants::c1_over_c2() const {
    if (c0 == 0.0) {
        throw DomainError("ansatz", "c1_over_c2", "c0 = 0 leaves the ratio undetermined");
    }
    return c0c1_over_c2 / c0;
}

double AnsatzConstants::warp_factor(double t) const {
    const double a = base_factor(t);
    if (!(a > 0.0)) {
        throw DomainError("ansatz", "warp_factor", "1 + c0 t must be positive, t = " + std::to_string(t));
    }
    if (c0 == 0.0) return std::exp(c0c1_over_c2 * t);
    return std::pow(a, c0c1_over_c2 / c0);
}

bool AnsatzConstants::self_similar() const {
    return std::abs(c0c1_over_c2 - 0.5 * c0) <= 1e-12 * std::max(1.0, std::abs(c0));
}

Interval AnsatzConstants::time_domain() const {
    if (c0 > 0.0) return Interval::open(-1.0 / c0, kInf);
    if (c0 < 0.0) return Interval::open(-kInf, -1.0 / c0);
    return Interval{};
}

// ---------------------------------------------------------------------------
// profile equations

double AnsatzResiduals::max_abs() const { return std::max({std::abs(r1), std::abs(r2), std::abs(r3)}); }

AnsatzResiduals residuals(const ProfileSet& profiles, int n, int m, double rho, const AnsatzConstants& constants,
                          double xi) {
    const auto p = profiles.at(xi);
    const double nd = n, md = m;
    const double mu2 = p.mu.v * p.mu.v;
    const double lm = p.mu.d1 / p.mu.v;   // mu'/mu
    const double qm = p.mu.d2 / p.mu.v;   // mu''/mu
    const double lf = p.f.d1 / p.f.v;     // f'/f
    const double qf = p.f.d2 / p.f.v;     // f''/f
    const double dp = p.phi.d1, ddp = p.phi.d2;

    AnsatzResiduals r;
    r.r1 = (nd - 2.0) * qm - md * qf - 2.0 * md * lf * lm + ddp + 2.0 * lm * dp;
    r.r2 = (1.0 - 2.0 * (nd - 1.0) * rho) * qm - (nd - 1.0) * (1.0 - nd * rho) * lm * lm +
           md * (1.0 - 2.0 * (nd - 2.0) * rho) * lm * lf + 2.0 * md * rho * qf + md * (md - 1.0) * rho * lf * lf -
           lm * dp + constants.c0 / (2.0 * mu2);
    r.r3 = -(1.0 - 2.0 * md * rho) * qf + (nd - 2.0) * (1.0 - 2.0 * md * rho) * lm * lf -
           (md - 1.0) * (1.0 - md * rho) * lf * lf + dp * lf - 2.0 * rho * (nd - 1.0) * qm +
           rho * nd * (nd - 1.0) * lm * lm + constants.c0c1_over_c2 / mu2;
    return r;
}

ConstantFit solve_constants(const ProfileSet& profiles, int n, int m, double rho, std::span<const double> xis) {
    if (xis.size() < 2) {
        throw DegenerateFit("ansatz", "solve_constants", "at least two sample points are needed");
    }
    const Eigen::Index k = static_cast<Eigen::Index>(xis.size());
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(2 * k, 2);
    Eigen::VectorXd rhs(2 * k);
    const AnsatzConstants zero{0.0, 0.0, rho};
    for (Eigen::Index i = 0; i < k; ++i) {
        const double xi = xis[static_cast<std::size_t>(i)];
        const auto r0 = residuals(profiles, n, m, rho, zero, xi);
        const double mu = profiles.mu(xi);
        design(2 * i, 0) = 1.0 / (2.0 * mu * mu);
        design(2 * i + 1, 1) = 1.0 / (mu * mu);
        rhs[2 * i] = -r0.r2;
        rhs[2 * i + 1] = -r0.r3;
    }
    if (!design.allFinite() || !rhs.allFinite()) {
        throw DegenerateFit("ansatz", "solve_constants", "non-finite coefficients at the sample points");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-12);
    if (qr.rank() < 2) {
        throw DegenerateFit("ansatz", "solve_constants", "the constant terms are not identifiable from the samples");
    }
    const Eigen::Vector2d c = qr.solve(rhs);

    ConstantFit fit{c[0], c[1], 0.0};
    const AnsatzConstants fitted{c[0], c[1], rho};
    for (double xi : xis) {
        fit.max_residual = std::max(fit.max_residual, residuals(profiles, n, m, rho, fitted, xi).max_abs());
    }
    if (!(fit.max_residual < kConstantFitTolerance)) {
        throw NoSolution("ansatz", "solve_constants",
                         "best fit leaves max residual " + std::to_string(fit.max_residual), fit.max_residual);
    }
    return fit;
}

// ---------------------------------------------------------------------------
// scenarios

int Scenario::base_dim() const { return kind == Kind::CoshEinstein ? 1 : frame->n; }

Eigen::VectorXd Scenario::point_at(double coordinate) const {
    if (kind == Kind::CoshEinstein) return Eigen::VectorXd::Constant(1, coordinate);
    return coordinate * frame->axis;
}

Eigen::VectorXd Scenario::sample_point(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> along(spatial_window.lo, spatial_window.hi);
    Eigen::VectorXd x = point_at(along(rng));
    if (kind == Kind::CoshEinstein) return x;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd v(frame->n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = unit(rng);
    v -= v.dot(frame->axis) * frame->axis;
    return x + v;
}

void Scenario::check_point(const char* op, const Eigen::Ref<const Eigen::VectorXd>& x, double t) const {
    if (x.size() != base_dim()) {
        throw DomainError("ansatz", op, "point has dimension " + std::to_string(x.size()) + ", expected " +
                                            std::to_string(base_dim()));
    }
    if (!time_domain.contains(t)) {
        throw DomainError("ansatz", op, "t = " + std::to_string(t) + " outside the time domain of " + name);
    }
}

namespace {

// Jets of the time-t profiles: mu_t = mu / sqrt(A), f_t = w b f.
struct TimeSlice {
    Jet2 mu, f, phi;
    double a = 1.0;
};

double cosh_rate(const Scenario& s) { return 2.0 * (s.total_dimension - 1) * s.perturbation.rate_scale; }

TimeSlice ansatz_slice(const Scenario& s, double xi, double t, bool unit_warp = false) {
    const AnsatzConstants c{s.perturbation.rate_scale * s.constants.c0,
                            s.perturbation.rate_scale * s.constants.c0c1_over_c2, s.constants.rho};
    const double a = c.base_factor(t);
    if (!(a > 0.0)) {
        throw DomainError("ansatz", "evaluate", "1 + c0 t is not positive at t = " + std::to_string(t));
    }
    const auto p = s.profiles->at(xi);
    const double w = unit_warp ? 1.0 : s.perturbation.warp_scale * c.warp_factor(t);
    return {scale(p.mu, 1.0 / std::sqrt(a)), scale(p.f, w), p.phi, a};
}

LocalGeometry ansatz_geometry(const Scenario& sc, double xi, double t, bool unit_warp) {
    const auto s = ansatz_slice(sc, xi, t, unit_warp);
    const int n = sc.frame->n;
    const auto& axis = sc.frame->axis;
    LocalGeometry g;
    g.base = {conformal_metric<double>(s.mu, n), conformal_ricci_tensor<double>(s.mu, axis),
              conformal_scalar<double>(s.mu, n)};
    const auto grads = grad_terms<double>(s.f, s.phi, s.mu);
    if (!(s.f.v > 0.0)) {
        throw PositivityError("ansatz", "local_geometry", "warping function not positive");
    }
    g.warp = {s.f.v, conformal_hessian_tensor<double>(s.f, s.mu, axis), conformal_laplacian<double>(s.f, s.mu, n),
              grads.grad_f_sq};
    g.hess_phi = conformal_hessian_tensor<double>(s.phi, s.mu, axis);
    g.df_dphi = grads.df_dphi;
    return g;
}

}  // namespace

Eigen::MatrixXd Scenario::base_metric(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const {
    check_point("base_metric", x, t);
    if (kind == Kind::CoshEinstein) return Eigen::MatrixXd::Constant(1, 1, 1.0 + cosh_rate(*this) * t);
    const auto s = ansatz_slice(*this, frame->xi(x), t);
    return conformal_metric<double>(s.mu, frame->n);
}

double Scenario::warp(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const {
    check_point("warp", x, t);
    if (kind == Kind::CoshEinstein) {
        return perturbation.warp_scale * std::sqrt(1.0 + cosh_rate(*this) * t) * std::cosh(x[0]);
    }
    return ansatz_slice(*this, frame->xi(x), t).f.v;
}

LocalGeometry Scenario::local_geometry(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const {
    check_point("local_geometry", x, t);
    LocalGeometry g;
    if (kind == Kind::CoshEinstein) {
        const double a = 1.0 + cosh_rate(*this) * t;
        const double r = x[0];
        const double w = perturbation.warp_scale * std::sqrt(a);
        const Jet2 f{w * std::cosh(r), w * std::sinh(r), w * std::cosh(r)};
        const LineMetric<double> line{a, 0.0};
        g.base = {Eigen::MatrixXd::Constant(1, 1, a), Eigen::MatrixXd::Zero(1, 1), 0.0};
        g.warp = {f.v, Eigen::MatrixXd::Constant(1, 1, line_hessian(f, line)), line_laplacian(f, line),
                  line_inner(f, f, line)};
        g.hess_phi = Eigen::MatrixXd::Zero(1, 1);
        g.df_dphi = 0.0;
        return g;
    }
    return ansatz_geometry(*this, frame->xi(x), t, false);
}

double Scenario::riemann_norm(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const {
    // over a flat fiber |Rm| ignores the scale of f, which may underflow at late times
    check_point("riemann_norm", x, t);
    const auto g = (kind == Kind::ConformalAnsatz && fiber.sectional == 0.0)
                       ? ansatz_geometry(*this, frame->xi(x), t, true)
                       : local_geometry(x, t);
    const int n = base_dim();
    const Eigen::MatrixXd inv = g.base.metric.inverse();
    const double base_sq = conformally_flat_rm_norm_sq<double>(g.base.ricci, inv, g.base.scalar, n);
    const double total = warped_rm_norm_sq<double>(base_sq, g.warp.hessian, inv, g.warp.f, g.warp.grad_sq, fiber.m,
                                                   fiber.sectional);
    return std::sqrt(std::max(total, 0.0));
}

Scenario Scenario::perturbed(const Perturbation& p) const {
    Scenario s = *this;
    s.perturbation = p;
    s.expected_class.reset();
    s.notes += " (perturbed)";
    return s;
}

// ---------------------------------------------------------------------------
// catalog

namespace {

const Interval kPositive = Interval::open(0.0, kInf);

Profile power_profile(const std::string& name) {
    return Profile::analytic(name, [](double x) { return Jet2{x, 1.0, 0.0}; }, kPositive);
}

Profile log_profile(double coeff) {
    return Profile::analytic(
        "log", [coeff](double x) { return Jet2{coeff * std::log(x), coeff / x, -coeff / (x * x)}; }, kPositive);
}

Interval default_time_window(double c0) {
    if (c0 > 0.0) return {0.0, 2.0};
    if (c0 < 0.0) return {-2.0, 0.0};
    return {-1.0, 1.0};
}

std::optional<HamiltonType> class_from_rate(double c0) {
    // |Rm| scales as 1 / (1 + c0 t) for every conformal ansatz scenario with flat fiber.
    if (c0 > 0.0) return HamiltonType::TypeIII;
    if (c0 < 0.0) return HamiltonType::TypeI;
    return HamiltonType::TypeIIb;
}

void fill_ansatz(Scenario& s, int n, int m, double rho, ProfileSet profiles, AnsatzFrame frame,
                 AnsatzConstants constants) {
    s.kind = Scenario::Kind::ConformalAnsatz;
    s.params = FlowParams::make(rho, m, n, 0.0);
    s.fiber = FiberDescriptor{m, 0.0, 0.0, 0.0, "ricci-flat"};
    s.profiles = std::move(profiles);
    s.frame = std::move(frame);
    s.constants = constants;
    s.time_domain = constants.time_domain();
    s.time_window = default_time_window(constants.c0);
    s.homothetic = constants.self_similar();
}

// mu = f = xi, phi = 2m ln xi on the upper half space.
Scenario hyperbolic(const std::string& name, int n, int m, double rho) {
    if (n < 2) throw DomainError("ansatz", "catalog", name + " needs base dimension at least 2");
    const double nd = n, md = m;
    const double poly = nd * nd - nd - 2.0 * nd * md + md * md + 3.0 * md;
    const AnsatzConstants c{2.0 * ((nd + md - 1.0) - rho * poly), -((nd + md - 1.0) + rho * poly), rho};
    Scenario s;
    s.name = name;
    fill_ansatz(s, n, m, rho, ProfileSet::make(power_profile("xi"), power_profile("xi"), log_profile(2.0 * md)),
                AnsatzFrame::last_axis(n, kPositive), c);
    s.spatial_window = {0.5, 2.0};
    s.expected_class = class_from_rate(c.c0);
    s.notes = "hyperbolic base x_n^{-2}<,> with warping x_n and drift 2m ln x_n over a complete Ricci-flat fiber";
    return s;
}

// mu = xi, f = 1, phi = 0 along a tilted axis.
Scenario halfspace(int n, int m, double rho) {
    if (n < 2) throw DomainError("ansatz", "catalog", "halfspace-product needs base dimension at least 2");
    const double nd = n;
    const AnsatzConstants c{2.0 * (nd - 1.0) * (1.0 - nd * rho), -(nd - 1.0) * nd * rho, rho};
    Scenario s;
    s.name = "halfspace-product";
    fill_ansatz(s, n, m, rho,
                ProfileSet::make(power_profile("xi"), Profile::constant(1.0, kPositive),
                                 Profile::constant(0.0, kPositive)),
                AnsatzFrame::make(Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(nd)), kPositive), c);
    s.spatial_window = {0.5, 2.0};
    s.expected_class = class_from_rate(c.c0);
    s.notes = "hyperbolic half space times a flat fiber rescaled by exp(k t) when c0 = 0";
    return s;
}

Scenario exp_incomplete() {
    const int n = 2, m = 1;
    const double rho = 0.25;
    Scenario s;
    s.name = "exp-incomplete";
    auto mu = Profile::analytic(
        "exp", [](double x) { const double e = std::exp(x); return Jet2{e, e, e}; }, kPositive);
    auto f = Profile::analytic(
        "1+exp(-2xi)/2",
        [](double x) { const double e = std::exp(-2.0 * x); return Jet2{1.0 + 0.5 * e, -e, 2.0 * e}; }, kPositive);
    auto phi = Profile::analytic(
        "-exp(-2xi)/4",
        [](double x) { const double e = std::exp(-2.0 * x); return Jet2{-0.25 * e, 0.5 * e, -e}; }, kPositive);
    Eigen::VectorXd axis(2);
    axis << 0.6, 0.8;
    fill_ansatz(s, n, m, rho, ProfileSet::make(std::move(mu), std::move(f), std::move(phi)),
                AnsatzFrame::make(axis, kPositive), AnsatzConstants{1.0, 1.0, rho});
    s.spatial_window = {0.1, 2.0};
    s.complete = false;
    s.expected_class.reset();
    s.notes = "exponential conformal factor on xi > 0; the family is not complete";
    return s;
}

Scenario cosh_einstein(int total_dimension) {
    if (total_dimension < 2) throw DomainError("ansatz", "catalog", "cosh-einstein needs total dimension >= 2");
    const int m = total_dimension - 1;
    Scenario s;
    s.name = "cosh-einstein";
    s.kind = Scenario::Kind::CoshEinstein;
    s.total_dimension = total_dimension;
    const double lambda = -(m - 1.0);
    s.params = FlowParams::make(0.0, m, 1, m * lambda);
    s.fiber = FiberDescriptor{m, lambda, m * lambda, -1.0, "hyperbolic"};
    s.time_domain = Interval::open(-1.0 / (2.0 * (total_dimension - 1)), kInf);
    s.time_window = {0.0, 2.0};
    s.spatial_window = {-2.0, 2.0};
    s.homothetic = true;
    s.expected_class = HamiltonType::TypeIII;
    s.constants = AnsatzConstants{2.0 * (total_dimension - 1), 0.0, 0.0};
    s.notes = "hyperbolic space as dr^2 + cosh^2 r g_H under Ricci flow, a(t) = 1 + 2(N-1)t";
    return s;
}

void reject_overrides(const std::string& name, const ScenarioOverrides& o) {
    if (o.n || o.m || o.rho) {
        throw ConfigError("ansatz", "catalog", name + " has fixed parameters and takes no overrides");
    }
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"hyperbolic-general", "hyperbolic-immortal", "hyperbolic-ancient",
            "halfspace-product",  "exp-incomplete",      "cosh-einstein"};
}

Scenario catalog(const std::string& name, const ScenarioOverrides& o) {
    if (name == "hyperbolic-general") {
        Scenario s = hyperbolic(name, o.n.value_or(3), o.m.value_or(2), o.rho.value_or(0.1));
        // keep away from t = 0 where fast rates make the centered time differences stiff
        if (s.constants.c0 > 0.0) s.time_window = {0.5, 2.5};
        return s;
    }
    if (name == "hyperbolic-immortal") {
        reject_overrides(name, o);
        Scenario s = hyperbolic(name, 2, 1, 1.0 / 3.0);
        s.spatial_window = {0.5, 2.0};
        s.time_window = {0.0, 2.0};
        return s;
    }
    if (name == "hyperbolic-ancient") {
        reject_overrides(name, o);
        return hyperbolic(name, 2, 1, 2.0);
    }
    if (name == "halfspace-product") return halfspace(o.n.value_or(3), o.m.value_or(1), o.rho.value_or(1.0 / 3.0));
    if (name == "exp-incomplete") {
        reject_overrides(name, o);
        return exp_incomplete();
    }
    if (name == "cosh-einstein") {
        if (o.rho && *o.rho != 0.0) {
            throw ConfigError("ansatz", "catalog", "cosh-einstein is a Ricci flow solution; rho must be 0");
        }
        int total = o.n.value_or(3);
        if (o.m) {
            if (o.n && *o.n != *o.m + 1) {
                throw ConfigError("ansatz", "catalog", "cosh-einstein needs m = n - 1");
            }
            total = *o.m + 1;
        }
        return cosh_einstein(total);
    }
    throw UnknownScenario("ansatz", "catalog", "no scenario named '" + name + "'");
}

// ---------------------------------------------------------------------------
// direct check of the flow equation

FlowResidual flow_residual(const Scenario& scenario, const Eigen::Ref<const Eigen::VectorXd>& x, double t,
                           double dt_fd) {
    if (!(dt_fd > 0.0)) throw DomainError("ansatz", "flow_residual", "dt_fd must be positive");
    if (!scenario.time_domain.contains(t - dt_fd) || !scenario.time_domain.contains(t + dt_fd)) {
        throw DomainError("ansatz", "flow_residual", "t +- dt_fd leaves the time domain");
    }
    const Eigen::MatrixXd dg =
        (scenario.base_metric(x, t + dt_fd) - scenario.base_metric(x, t - dt_fd)) / (2.0 * dt_fd);
    const double fp = scenario.warp(x, t + dt_fd), fm = scenario.warp(x, t - dt_fd);
    const double df2 = (fp * fp - fm * fm) / (2.0 * dt_fd);

    const auto g = scenario.local_geometry(x, t);
    const auto w = warped_components(g.base, g.warp, scenario.fiber.data());
    const double rho = scenario.params.rho;
    const double f = g.warp.f;

    const Eigen::MatrixXd horizontal = dg + 2.0 * (w.ric_horizontal + g.hess_phi - rho * w.scalar * g.base.metric);
    const double vertical = df2 + 2.0 * (w.ric_vertical_coeff + f * g.df_dphi - rho * w.scalar * f * f);

    FlowResidual r;
    r.horizontal = horizontal.cwiseAbs().maxCoeff();
    r.vertical = std::abs(vertical);
    r.max_abs = std::max(r.horizontal, r.vertical);
    return r;
}

}  // namespace rbflow
