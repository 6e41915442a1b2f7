#include "rbflow/run.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rbflow/classify.hpp"
#include "rbflow/errors.hpp"
#include "rbflow/estimate.hpp"
#include "rbflow/problems.hpp"

namespace rbflow {

using json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Mode, std::string_view>, 7> kModeNames{{
    {Mode::Simulate, "simulate"},
    {Mode::VerifyAnsatz, "verify-ansatz"},
    {Mode::VerifyFlow, "verify-flow"},
    {Mode::VerifyEstimate, "verify-estimate"},
    {Mode::IdentityCheck, "identity-check"},
    {Mode::Classify, "classify"},
    {Mode::Catalog, "catalog"},
}};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw ConfigError("cli", "run", "cannot write " + path.string());
        write(header);
    }
    void row(std::initializer_list<double> values) {
        std::vector<std::string> cells;
        for (double v : values) cells.push_back(fmt(v));
        write(cells);
    }
    void write(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

// summary document under construction plus the artifacts written so far
struct Report {
    json measured = json::object();
    json checks = json::array();
    std::vector<std::filesystem::path> artifacts;
    std::filesystem::path dir;

    std::filesystem::path file(const std::string& name) {
        artifacts.push_back(dir / name);
        return artifacts.back();
    }
    // value <= limit (or >= when at_least)
    void check(const std::string& name, double value, double limit, bool at_least = false) {
        const bool pass = std::isfinite(value) && (at_least ? value >= limit : value <= limit);
        checks.push_back({{"name", name}, {"value", value}, {at_least ? "min" : "max", limit}, {"pass", pass}});
    }
    void check_flag(const std::string& name, bool pass) { checks.push_back({{"name", name}, {"pass", pass}}); }
    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c["pass"].get<bool>(); });
    }
};

// --- json reading ----------------------------------------------------------

void allow_keys(const json& j, const char* where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError("cli", "parse_config", std::string(where) + " must be a table");
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
            throw ConfigError("cli", "parse_config", std::string("unknown key '") + k + "' in " + where);
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("cli", "parse_config", std::string("bad value for '") + key + "': " + e.what());
    }
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    T v{};
    read(j, key, v);
    out = v;
}

template <typename E, std::size_t N>
E read_enum(const json& j, const char* key, E fallback, const std::array<std::pair<E, std::string_view>, N>& names) {
    if (!j.contains(key)) return fallback;
    std::string s;
    read(j, key, s);
    for (const auto& [e, name] : names) {
        if (name == s) return e;
    }
    throw ConfigError("cli", "parse_config", "bad value '" + s + "' for '" + key + "'");
}

constexpr std::array<std::pair<Integrator, std::string_view>, 2> kIntegrators{
    {{Integrator::ExplicitRK4, "rk4"}, {Integrator::ExplicitEuler, "euler"}}};
constexpr std::array<std::pair<DtPolicy, std::string_view>, 2> kPolicies{
    {{DtPolicy::Cfl, "cfl"}, {DtPolicy::Fixed, "fixed"}}};
constexpr std::array<std::pair<Boundary, std::string_view>, 2> kBoundaries{
    {{Boundary::DirichletFromExact, "dirichlet"}, {Boundary::Neumann0, "neumann"}}};

template <typename E, std::size_t N>
std::string name_of(E e, const std::array<std::pair<E, std::string_view>, N>& names) {
    for (const auto& [v, name] : names) {
        if (v == e) return std::string(name);
    }
    return "?";
}

json overrides_json(const ScenarioOverrides& o) {
    json j = json::object();
    if (o.n) j["n"] = *o.n;
    if (o.m) j["m"] = *o.m;
    if (o.rho) j["rho"] = *o.rho;
    return j;
}

json config_json(const RunConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["mode"] = std::string(to_string(c.mode));
    j["scenario"] = c.scenario;
    j["overrides"] = overrides_json(c.overrides);
    if (c.mode == Mode::Catalog) j["catalog_action"] = c.catalog_action;
    j["seed"] = c.seed;
    j["output_times"] = c.output_times;
    j["tolerance"] = c.tolerance ? json(*c.tolerance) : json(nullptr);
    j["solver"] = {{"integrator", name_of(c.solver.integrator, kIntegrators)},
                   {"dt_policy", name_of(c.solver.dt_policy, kPolicies)},
                   {"dt", c.solver.dt},
                   {"cfl", c.solver.cfl},
                   {"boundary", name_of(c.solver.boundary, kBoundaries)},
                   {"u_floor", c.solver.u_floor},
                   {"freeze_metric", c.solver.freeze_metric},
                   {"npts", c.npts}};
    j["estimate"] = {{"R", c.estimate.R}, {"refine", c.estimate.refine}};
    j["perturbation"] = {{"warp_scale", c.perturbation.warp_scale}, {"rate_scale", c.perturbation.rate_scale}};
    j["samples"] = c.samples;
    j["dt_fd"] = c.dt_fd;
    return j;
}

json scenario_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["kind"] = s.kind == Scenario::Kind::CoshEinstein ? "cosh-einstein" : "conformal-ansatz";
    j["n"] = s.params.n;
    j["m"] = s.params.m;
    j["rho"] = s.params.rho;
    j["s_fiber"] = s.params.s_fiber;
    j["sigma"] = s.params.sigma;
    j["regime"] = std::string(to_string(s.params.regime));
    j["fiber"] = s.fiber.model;
    j["time_domain"] = {s.time_domain.lo, s.time_domain.hi};
    j["time_window"] = {s.time_window.lo, s.time_window.hi};
    j["spatial_window"] = {s.spatial_window.lo, s.spatial_window.hi};
    j["c0"] = s.constants.c0;
    j["c0c1_over_c2"] = s.constants.c0c1_over_c2;
    j["self_similar"] = s.constants.self_similar();
    j["homothetic"] = s.homothetic;
    j["complete"] = s.complete;
    j["expected_class"] = s.expected_class ? json(std::string(to_string(*s.expected_class))) : json(nullptr);
    j["notes"] = s.notes;
    return j;
}

json bracket_json(const Bracket& b) {
    return {{"bracket", b.bracket},
            {"factor", b.factor},
            {"terms",
             {{"k1", b.terms.k1},
              {"k2", b.terms.k2},
              {"radius", b.terms.radius},
              {"time", b.terms.time},
              {"gamma", b.terms.gamma},
              {"b", b.terms.b},
              {"grad_b", b.terms.grad_b},
              {"nonlinear", b.terms.nonlinear}}}};
}

// --- modes -----------------------------------------------------------------

std::vector<double> default_simulation_times(const std::string& name) {
    const double end = name == "cosh-einstein" ? 1.0 : 0.1;
    std::vector<double> t;
    for (int i = 1; i <= 10; ++i) t.push_back(end * i / 10.0);
    return t;
}

void simulate(const RunConfig& c, Report& rep) {
    const auto problem = simulation_problem(c.scenario, c.npts, c.overrides.n.value_or(3));
    SolverConfig solver = c.solver;
    solver.freeze_metric = solver.freeze_metric || problem.freeze_metric;
    const auto times = c.output_times.empty() ? default_simulation_times(c.scenario) : c.output_times;

    std::vector<CoupledState> traj{problem.initial};
    for (auto& s : evolve_coupled(problem.initial, problem.params, problem.grid, times, solver, problem.boundary)) {
        traj.push_back(std::move(s));
    }

    const double inv_sigma = 1.0 / problem.params.sigma;
    CsvWriter tcsv(rep.file("trajectory.csv"), {"t", "x", "a", "f", "u", "a_exact", "f_exact", "error_a", "error_f"});
    CsvWriter rcsv(rep.file("residuals.csv"), {"t", "linf_error_a", "linf_error_f", "rel_error", "cov_residual"});
    double worst_rel = 0.0, worst_cov = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& s = traj[k];
        double ea = 0.0, ef = 0.0, fscale = 0.0, ascale = 0.0;
        for (int i = 0; i < problem.grid.npts; ++i) {
            const double x = problem.grid.x(i);
            const auto [a_ex, f_ex] = problem.exact(x, s.t);
            const double u = s.f[i] >= 0.0 ? std::pow(s.f[i], inv_sigma) : std::numeric_limits<double>::quiet_NaN();
            tcsv.row({s.t, x, s.a[i], s.f[i], u, a_ex, f_ex, s.a[i] - a_ex, s.f[i] - f_ex});
            ea = std::max(ea, std::abs(s.a[i] - a_ex));
            ef = std::max(ef, std::abs(s.f[i] - f_ex));
            ascale = std::max(ascale, std::abs(a_ex));
            fscale = std::max(fscale, std::abs(f_ex));
        }
        const double rel = std::max(ea / ascale, ef / fscale);
        worst_rel = std::max(worst_rel, rel);
        double cov = std::numeric_limits<double>::quiet_NaN();
        if (k > 0 && k + 1 < traj.size() && problem.grid.npts >= 5) {
            std::vector<SamplePoint> pts;
            for (int i = 2; i <= problem.grid.npts - 3; ++i) pts.push_back({static_cast<int>(k), i});
            cov = change_of_variables_residual(traj, problem.params, problem.grid, pts);
            worst_cov = std::max(worst_cov, cov);
        }
        rcsv.row({s.t, ea, ef, rel, cov});
    }
    rep.measured["records"] = traj.size();
    rep.measured["max_rel_error"] = worst_rel;
    rep.measured["max_cov_residual"] = worst_cov;
    rep.check("max_rel_error", worst_rel, c.tolerance.value_or(1e-3));
}

void verify_ansatz(const RunConfig& c, Report& rep) {
    const auto s = catalog(c.scenario, c.overrides);
    if (!s.profiles) throw UnsupportedModel("cli", "verify-ansatz", s.name + " is not a conformal ansatz solution");
    constexpr int kPoints = 50;
    std::vector<double> xis;
    const auto& w = s.spatial_window;
    for (int i = 0; i < kPoints; ++i) {
        const double f = static_cast<double>(i) / (kPoints - 1);
        xis.push_back(w.lo > 0.0 ? w.lo * std::pow(w.hi / w.lo, f) : w.lo + f * (w.hi - w.lo));
    }
    CsvWriter csv(rep.file("residuals.csv"), {"xi", "r1", "r2", "r3"});
    double worst = 0.0;
    for (double xi : xis) {
        const auto r = residuals(*s.profiles, s.params.n, s.params.m, s.params.rho, s.constants, xi);
        csv.row({xi, r.r1, r.r2, r.r3});
        worst = std::max(worst, r.max_abs());
    }
    const auto fit = solve_constants(*s.profiles, s.params.n, s.params.m, s.params.rho, xis);
    rep.measured["max_residual"] = worst;
    rep.measured["c0"] = s.constants.c0;
    rep.measured["c0c1_over_c2"] = s.constants.c0c1_over_c2;
    rep.measured["fitted_c0"] = fit.c0;
    rep.measured["fitted_c0c1_over_c2"] = fit.c0c1_over_c2;
    rep.measured["fit_residual"] = fit.max_residual;
    rep.check("max_residual", worst, c.tolerance.value_or(1e-10));
    rep.check("fitted_c0_error", std::abs(fit.c0 - s.constants.c0), kConstantFitTolerance);
}

void verify_flow(const RunConfig& c, Report& rep) {
    const auto s = catalog(c.scenario, c.overrides).perturbed(c.perturbation);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> tdist(s.time_window.lo, s.time_window.hi);
    CsvWriter csv(rep.file("residuals.csv"), {"sample", "t", "coordinate", "max_abs", "horizontal", "vertical"});
    double worst = 0.0;
    for (int i = 0; i < c.samples; ++i) {
        const Eigen::VectorXd x = s.sample_point(rng);
        const double t = tdist(rng);
        const auto r = flow_residual(s, x, t, c.dt_fd);
        const double coord = s.frame ? s.frame->xi(x) : x[0];
        csv.row({static_cast<double>(i), t, coord, r.max_abs, r.horizontal, r.vertical});
        worst = std::max(worst, r.max_abs);
    }
    const double tol = c.tolerance.value_or(s.kind == Scenario::Kind::CoshEinstein ? 1e-6 : 1e-5);
    rep.measured["max_flow_residual"] = worst;
    rep.check("max_flow_residual", worst, tol);
}

void verify_estimate(const RunConfig& c, Report& rep) {
    const auto suite = estimate_suite(c.scenario, c.estimate.R, c.estimate.refine);
    check_hypotheses(suite.hypotheses, suite.params);
    const auto report = verify_estimate(suite.samples, suite.params, suite.gamma, suite.c, suite.alpha);
    const auto cut = cutoff_properties(suite.params);

    CsvWriter csv(rep.file("residuals.csv"), {"t", "r", "u", "grad_log_u", "b", "grad_b", "ratio"});
    for (std::size_t i = 0; i < suite.samples.size(); ++i) {
        const auto& s = suite.samples[i];
        if (std::isnan(report.ratios[i])) continue;
        csv.row({s.t, s.r, s.u, s.grad_log_u, s.b, s.grad_b, report.ratios[i]});
    }
    const auto& p = suite.params;
    rep.measured["estimate_params"] = {{"p", p.p},   {"q", p.q},   {"delta", p.delta}, {"D", p.D},
                                       {"k1", p.k1}, {"k2", p.k2}, {"R", p.R},         {"T", p.T},
                                       {"t0", p.t0}, {"tau", p.tau}, {"a", p.a_coeff},
                                       {"mode", p.mode == TimeMode::Forward ? "forward" : "backward"}};
    rep.measured["gamma"] = suite.gamma;
    rep.measured["c"] = suite.c;
    rep.measured["alpha"] = suite.alpha;
    rep.measured["sup_ratio"] = report.sup_ratio;
    rep.measured["samples_used"] = report.samples_used;
    rep.measured["argmax"] = {{"t", report.argmax.t}, {"r", report.argmax.r}, {"u", report.argmax.u},
                              {"grad_log_u", report.argmax.grad_log_u}};
    rep.measured["bracket_at_argmax"] = bracket_json(report.at_argmax);
    rep.measured["cutoff"] = {{"range", cut.range_ok},       {"plateau", cut.plateau_ok},
                              {"start", cut.start_ok},       {"monotone", cut.monotone_ok},
                              {"C_time", cut.C_time},        {"C_first", cut.C_first},
                              {"C_second", cut.C_second},    {"epsilon", cut.epsilon}};
    rep.check_flag("samples_used", report.samples_used > 0);
    rep.check("sup_ratio", report.sup_ratio, c.tolerance.value_or(1e6));
    rep.check_flag("cutoff_properties", cut.all_ok() && std::isfinite(cut.C_time) && std::isfinite(cut.C_first) &&
                                            std::isfinite(cut.C_second));
}

void identity_check(const RunConfig& c, Report& rep) {
    constexpr int kLevels = 4;
    CsvWriter csv(rep.file("residuals.csv"), {"level", "h", "x", "lhs", "rhs", "residual"});
    std::vector<double> maxima, steps;
    for (int level = 0; level < kLevels; ++level) {
        const auto ic = synthetic_identity_case(level);
        double worst = 0.0;
        for (int node : ic.nodes) {
            const auto terms = evolution_identity(ic.data, ic.params, node);
            const double x = -2.0 + node * ic.data.step;
            csv.row({static_cast<double>(level), ic.data.step, x, terms.lhs, terms.rhs(), terms.residual()});
            worst = std::max(worst, terms.residual());
        }
        maxima.push_back(worst);
        steps.push_back(ic.data.step);
    }
    double order = std::numeric_limits<double>::infinity();
    json orders = json::array();
    for (int i = 1; i < kLevels; ++i) {
        const double o = std::log(maxima[i - 1] / maxima[i]) / std::log(steps[i - 1] / steps[i]);
        orders.push_back(o);
        order = std::min(order, o);
    }
    const auto flat = synthetic_identity_case(0, true);
    double flat_worst = 0.0;
    for (int node : flat.nodes) flat_worst = std::max(flat_worst, evolution_identity_residual(flat.data, flat.params, node));
    rep.measured["max_residuals"] = maxima;
    rep.measured["orders"] = orders;
    rep.measured["constant_u_residual"] = flat_worst;
    rep.check("observed_order", order, 1.8, true);
    rep.check("constant_u_residual", flat_worst, c.tolerance.value_or(0.0));
}

void classify_mode(const RunConfig& c, Report& rep) {
    const auto s = catalog(c.scenario, c.overrides);
    const auto horizon = scenario_horizon(s);
    const auto times = classification_times(horizon);
    const auto samples = kmax_profile(s, times);
    const auto result = classify(horizon, samples);
    CsvWriter csv(rep.file("residuals.csv"), {"t", "kmax", "scaled"});
    for (const auto& x : samples) {
        const double scale = horizon.finite() ? horizon.T - x.t : x.t;
        csv.row({x.t, x.kmax, scale * x.kmax});
    }
    rep.measured["label"] = std::string(to_string(result.label));
    rep.measured["exponent"] = result.exponent;
    rep.measured["sup_stat"] = result.sup_stat;
    rep.measured["fit_rms"] = result.fit_rms;
    rep.measured["horizon"] = horizon.finite() ? json(horizon.T) : json("infinite");
    rep.measured["expected"] = s.expected_class ? json(std::string(to_string(*s.expected_class))) : json(nullptr);
    if (s.expected_class) rep.check_flag("label_matches_expected", result.label == *s.expected_class);
}

void catalog_mode(const RunConfig& c, Report& rep) {
    CsvWriter csv(rep.file("catalog.csv"),
                  {"name", "kind", "n", "m", "rho", "sigma", "regime", "expected_class", "complete", "homothetic"});
    auto line = [&](const Scenario& s) {
        csv.write({s.name, s.kind == Scenario::Kind::CoshEinstein ? "cosh-einstein" : "conformal-ansatz",
                   std::to_string(s.params.n), std::to_string(s.params.m), fmt(s.params.rho), fmt(s.params.sigma),
                   std::string(to_string(s.params.regime)),
                   s.expected_class ? std::string(to_string(*s.expected_class)) : "none",
                   s.complete ? "true" : "false", s.homothetic ? "true" : "false"});
    };
    if (c.catalog_action == "list") {
        json names = json::array();
        for (const auto& name : catalog_names()) {
            line(catalog(name));
            names.push_back(name);
        }
        rep.measured["scenarios"] = names;
    } else {
        const auto s = catalog(c.scenario, c.overrides);
        line(s);
        rep.measured["scenario"] = scenario_json(s);
    }
}

}  // namespace

std::string_view to_string(Mode mode) {
    for (const auto& [m, name] : kModeNames) {
        if (m == mode) return name;
    }
    return "?";
}

Mode mode_from_string(std::string_view text) {
    for (const auto& [m, name] : kModeNames) {
        if (name == text) return m;
    }
    throw ConfigError("cli", "parse_config", "unknown mode '" + std::string(text) + "'");
}

void RunConfig::validate() const {
    solver.validate();
    if (npts < 5) throw ConfigError("cli", "validate", "npts must be at least 5");
    if (samples < 1) throw ConfigError("cli", "validate", "samples must be positive");
    if (!(dt_fd > 0.0)) throw ConfigError("cli", "validate", "dt_fd must be positive");
    if (estimate.refine < 1) throw ConfigError("cli", "validate", "estimate.refine must be positive");
    if (tolerance && !(*tolerance >= 0.0)) throw ConfigError("cli", "validate", "tolerance must be nonnegative");
    if (!std::is_sorted(output_times.begin(), output_times.end())) {
        throw ConfigError("cli", "validate", "output_times must be increasing");
    }
    auto known = [&](const std::vector<std::string>& names) {
        if (std::find(names.begin(), names.end(), scenario) == names.end()) {
            throw UnknownScenario("cli", "validate", "no scenario named '" + scenario + "' for this mode");
        }
    };
    switch (mode) {
    case Mode::Simulate:
        known(simulation_names());
        for (double t : output_times) {
            if (!(t > 0.0)) throw DomainError("cli", "validate", "output times must be after the initial time 0");
        }
        break;
    case Mode::VerifyEstimate:
        known({"heat-reduction", "hyperbolic-immortal"});
        break;
    case Mode::IdentityCheck:
        break;
    case Mode::Catalog:
        if (catalog_action != "list" && catalog_action != "show") {
            throw ConfigError("cli", "validate", "catalog action must be list or show");
        }
        if (catalog_action == "list") break;
        [[fallthrough]];
    default:
        known(catalog_names());
        catalog(scenario, overrides);
    }
}

RunConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("cli", "parse_config", std::string("not valid JSON: ") + e.what());
    }
    allow_keys(j, "config",
               {"schema_version", "mode", "scenario", "catalog_action", "seed", "out_dir", "output_times", "tolerance",
                "solver", "estimate", "perturbation", "samples", "dt_fd"});
    int version = 0;
    read(j, "schema_version", version);
    if (version != kSchemaVersion) {
        throw ConfigError("cli", "parse_config",
                          "schema_version must be " + std::to_string(kSchemaVersion) + ", got " + std::to_string(version));
    }
    RunConfig c;
    if (j.contains("mode")) {
        std::string mode;
        read(j, "mode", mode);
        c.mode = mode_from_string(mode);
    }
    if (j.contains("scenario")) {
        const auto& s = j["scenario"];
        if (s.is_string()) {
            c.scenario = s.get<std::string>();
        } else {
            // inline definition: a catalog family with its parameters
            allow_keys(s, "scenario", {"name", "n", "m", "rho"});
            read(s, "name", c.scenario);
            read(s, "n", c.overrides.n);
            read(s, "m", c.overrides.m);
            read(s, "rho", c.overrides.rho);
        }
    }
    read(j, "catalog_action", c.catalog_action);
    read(j, "seed", c.seed);
    std::string out;
    read(j, "out_dir", out);
    if (!out.empty()) c.out_dir = out;
    read(j, "output_times", c.output_times);
    read(j, "tolerance", c.tolerance);
    read(j, "samples", c.samples);
    read(j, "dt_fd", c.dt_fd);
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        allow_keys(s, "solver", {"integrator", "dt_policy", "dt", "cfl", "boundary", "u_floor", "freeze_metric", "npts"});
        c.solver.integrator = read_enum(s, "integrator", c.solver.integrator, kIntegrators);
        c.solver.dt_policy = read_enum(s, "dt_policy", c.solver.dt_policy, kPolicies);
        c.solver.boundary = read_enum(s, "boundary", c.solver.boundary, kBoundaries);
        read(s, "dt", c.solver.dt);
        read(s, "cfl", c.solver.cfl);
        read(s, "u_floor", c.solver.u_floor);
        read(s, "freeze_metric", c.solver.freeze_metric);
        read(s, "npts", c.npts);
    }
    if (j.contains("estimate")) {
        allow_keys(j["estimate"], "estimate", {"R", "refine"});
        read(j["estimate"], "R", c.estimate.R);
        read(j["estimate"], "refine", c.estimate.refine);
    }
    if (j.contains("perturbation")) {
        allow_keys(j["perturbation"], "perturbation", {"warp_scale", "rate_scale"});
        read(j["perturbation"], "warp_scale", c.perturbation.warp_scale);
        read(j["perturbation"], "rate_scale", c.perturbation.rate_scale);
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cli", "load_config", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::filesystem::path resolve_out_dir(const std::optional<std::string>& cli_out, const RunConfig& config) {
    if (cli_out && !cli_out->empty()) return *cli_out;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return config.out_dir;
}

int exit_code_for(std::string_view kind) {
    static const std::set<std::string_view> numerical{"FloorBreach", "CFLViolation", "PositivityError"};
    static const std::set<std::string_view> property{"NoSolution", "HypothesisViolation", "DegenerateFit",
                                                     "InsufficientSamples"};
    if (numerical.count(kind)) return kExitNumerical;
    if (property.count(kind)) return kExitProperty;
    return kExitValidation;
}

RunResult run(const RunConfig& config) {
    Report rep;
    rep.dir = config.out_dir;
    json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["parameters"] = config_json(config);
    RunResult result;
    try {
        std::filesystem::create_directories(rep.dir);
        config.validate();
        switch (config.mode) {
        case Mode::Simulate: simulate(config, rep); break;
        case Mode::VerifyAnsatz: verify_ansatz(config, rep); break;
        case Mode::VerifyFlow: verify_flow(config, rep); break;
        case Mode::VerifyEstimate: verify_estimate(config, rep); break;
        case Mode::IdentityCheck: identity_check(config, rep); break;
        case Mode::Classify: classify_mode(config, rep); break;
        case Mode::Catalog: catalog_mode(config, rep); break;
        }
        result.exit_code = rep.all_pass() ? kExitOk : kExitProperty;
        result.message = rep.all_pass() ? "ok" : "property check failed";
        summary["status"] = rep.all_pass() ? "ok" : "property-failure";
    } catch (const Error& e) {
        result.exit_code = exit_code_for(e.kind());
        result.message = e.what();
        summary["status"] = "error";
        summary["error"] = {{"kind", e.kind()}, {"module", e.module()}, {"operation", e.operation()},
                            {"message", e.what()}};
    } catch (const std::filesystem::filesystem_error& e) {
        result.exit_code = kExitValidation;
        result.message = std::string("[cli::run] ConfigError: ") + e.what();
        summary["status"] = "error";
        summary["error"] = {{"kind", "ConfigError"}, {"module", "cli"}, {"operation", "run"}, {"message", e.what()}};
    }
    summary["exit_code"] = result.exit_code;
    summary["measured"] = rep.measured;
    summary["checks"] = rep.checks;

    std::error_code ec;
    if (std::filesystem::is_directory(rep.dir, ec)) {
        const auto path = rep.dir / "summary.json";
        std::ofstream out(path);
        out << summary.dump(2) << '\n';
        rep.artifacts.push_back(path);
    }
    result.artifacts = rep.artifacts;
    return result;
}

}  // namespace rbflow
