#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace rbflow {

/// Nonlinearity class of the warping equation, keyed on sigma.
enum class Regime { Superlinear, Linear, Sublinear, ConstantSource, Singular };

std::string_view to_string(Regime regime);

/// |(m+1) rho - 1| below this is treated as the pole of the change of variables.
inline constexpr double kPoleTolerance = 1e-12;

/// sigma = (1 - 2 m rho) / (m - rho m^2 - m rho). Throws PoleError near (m+1) rho = 1.
double derive_sigma(double rho, int m);

Regime regime_of(double sigma);

/// Scalar parameter bundle of a warped Ricci-Bourguignon flow: coupling rho,
/// fiber dimension m, base dimension n and fiber scalar curvature S_F.
struct FlowParams {
    double rho = 0.0;
    int m = 1;
    int n = 1;
    double s_fiber = 0.0;

    double sigma = 1.0;
    double a_coeff = 0.0;    // 2 m rho
    double alpha_exp = -1.0; // 1 - 2 sigma
    Regime regime = Regime::Singular;

    static FlowParams make(double rho, int m, int n, double s_fiber);

    /// Weak parabolicity of the warping equation, 1 - 2 m rho > 0.
    bool parabolic() const { return a_coeff < 1.0; }
};

/// Coefficients (a, b, c, alpha) of
///   u_t = Delta_phi u - a Delta u + b u + c u^alpha.
template <typename Scalar = double>
struct UnifiedCoefficients {
    Scalar a{};
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b;
    Scalar c{};
    Scalar alpha{};
};

/// Maps the warping equation for u = f^{1/sigma} onto the unified form, with
/// b = (rho / sigma) S_g evaluated on the supplied base scalar curvature samples.
UnifiedCoefficients<double> unified_coefficients(const FlowParams& params,
                                                 const Eigen::Ref<const Eigen::VectorXd>& s_base);

}  // namespace rbflow
