#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rbflow/geometry.hpp"
#include "rbflow/hamilton.hpp"
#include "rbflow/params.hpp"

namespace rbflow {

/// Time constants of the homothetic ansatz g = (1 + c0 t) g0, f = b(t) f0 with
/// b = (1 + c0 t)^{c1/c2}. Stored as c0 and the product c0 c1 / c2, the only
/// combinations entering the profile equations; with c0 = 0 the warp factor
/// is the limit b = exp(c0 c1 / c2 * t).
struct AnsatzConstants {
    double c0 = 0.0;
    double c0c1_over_c2 = 0.0;
    double rho = 0.0;

    static AnsatzConstants from_ratio(double c0, double c1_over_c2, double rho);

    /// Throws DomainError when c0 = 0 (the ratio is then not determined).
    double c1_over_c2() const;
    double base_factor(double t) const { return 1.0 + c0 * t; }
    double warp_factor(double t) const;
    /// 2 c1 = c2: the whole metric is a time-dependent multiple of its initial value.
    bool self_similar() const;
    /// Open interval of t with 1 + c0 t > 0.
    Interval time_domain() const;
};

/// Left-hand sides of the three profile equations of the conformal ansatz.
struct AnsatzResiduals {
    double r1 = 0.0; // Ricci-flat fiber compatibility (constant free)
    double r2 = 0.0; // horizontal equation, carries c0 / (2 mu^2)
    double r3 = 0.0; // warping equation, carries c0 c1 / (c2 mu^2)

    double max_abs() const;
};

AnsatzResiduals residuals(const ProfileSet& profiles, int n, int m, double rho, const AnsatzConstants& constants,
                          double xi);

struct ConstantFit {
    double c0 = 0.0;
    double c0c1_over_c2 = 0.0;
    double max_residual = 0.0;
};

/// Least-squares fit of (c0, c0 c1 / c2) over the sample points. Throws
/// DegenerateFit when the constants are not identifiable and NoSolution when
/// the best fit leaves a residual of 1e-8 or more.
ConstantFit solve_constants(const ProfileSet& profiles, int n, int m, double rho, std::span<const double> xis);

inline constexpr double kConstantFitTolerance = 1e-8;

/// Einstein fiber description; the fiber is modelled as a space form of the
/// given sectional curvature wherever the full curvature tensor is needed.
struct FiberDescriptor {
    int m = 1;
    double ric_coeff = 0.0;
    double s_fiber = 0.0;
    double sectional = 0.0;
    std::string model = "ricci-flat";

    FiberData data() const { return {m, s_fiber, ric_coeff}; }
};

/// Multiplicative perturbations of a closed form, used to check that the
/// residual checkers detect non-solutions.
struct Perturbation {
    double warp_scale = 1.0; // f -> warp_scale * f
    double rate_scale = 1.0; // c0 -> rate_scale * c0 (time rate of the base metric)
};

/// All base quantities needed to assemble Ric + Hess phi - rho S g on a warped product.
struct LocalGeometry {
    BaseCurvature<double> base;
    WarpingData<double> warp;
    Eigen::MatrixXd hess_phi;
    double df_dphi = 0.0;
};

struct ScenarioOverrides {
    std::optional<int> n;
    std::optional<int> m;
    std::optional<double> rho;
};

/// A catalog entry: closed-form space-time metric on B x F together with its
/// parameters, time domain, fiber data and classification ground truth.
class Scenario {
public:
    enum class Kind { ConformalAnsatz, CoshEinstein };

    std::string name;
    Kind kind = Kind::ConformalAnsatz;
    FlowParams params;
    FiberDescriptor fiber;
    Interval time_domain;
    std::optional<HamiltonType> expected_class;
    bool complete = true;
    bool homothetic = false;
    std::string notes;

    std::optional<ProfileSet> profiles;
    std::optional<AnsatzFrame> frame;
    AnsatzConstants constants;
    int total_dimension = 0; // cosh-einstein: dimension of B x F

    Interval spatial_window; // xi (ansatz) or r (cosh-einstein) range used for sampling
    Interval time_window;    // closed sub-interval of the time domain used for sampling
    Perturbation perturbation;

    int base_dim() const;
    Eigen::VectorXd point_at(double coordinate) const;
    /// Seeded interior sample inside the spatial window; transverse coordinates in [-1, 1].
    Eigen::VectorXd sample_point(std::mt19937_64& rng) const;

    Eigen::MatrixXd base_metric(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const;
    double warp(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const;
    LocalGeometry local_geometry(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const;
    /// Pointwise norm |Rm| of the full metric at (x, t).
    double riemann_norm(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const;

    Scenario perturbed(const Perturbation& p) const;

private:
    void check_point(const char* op, const Eigen::Ref<const Eigen::VectorXd>& x, double t) const;
};

std::vector<std::string> catalog_names();

/// Throws UnknownScenario for names outside the catalog.
Scenario catalog(const std::string& name, const ScenarioOverrides& overrides = {});

struct FlowResidual {
    double max_abs = 0.0;
    double horizontal = 0.0; // max |component| of the horizontal block
    double vertical = 0.0;   // |coefficient| of g_F in the vertical block
};

/// Max-norm of d/dt g_bar + 2 (Ric + Hess phi - rho S g_bar) at (x, t), with
/// the time derivative from centered differences of step dt_fd.
FlowResidual flow_residual(const Scenario& scenario, const Eigen::Ref<const Eigen::VectorXd>& x, double t,
                           double dt_fd);

}  // namespace rbflow
