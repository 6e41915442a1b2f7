#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <type_traits>

#include "rbflow/profile.hpp"

namespace rbflow {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Non-deduced views so the scalar type is taken from the jets alone.
template <typename Scalar>
using VecRef = std::type_identity_t<const Eigen::Ref<const Vec<Scalar>>&>;
template <typename Scalar>
using MatRef = std::type_identity_t<const Eigen::Ref<const Mat<Scalar>>&>;

// ---------------------------------------------------------------------------
// Conformal ansatz base: g0 = mu(xi)^{-2} <,> on R^n with xi(x) = <x, axis>.
// All tensors are returned in the standard coordinate frame of R^n.
// ---------------------------------------------------------------------------

template <typename Scalar>
Scalar conformal_ricci(const Jet<Scalar>& mu, VecRef<Scalar> axis, Eigen::Index i,
                       Eigen::Index j) {
    const Eigen::Index n = axis.size();
    const Scalar mmpp = mu.v * mu.d2;
    const Scalar cross = static_cast<Scalar>(n - 2) * axis[i] * axis[j] * mmpp;
    const Scalar diag = (i == j) ? mmpp - static_cast<Scalar>(n - 1) * mu.d1 * mu.d1 : Scalar(0);
    return (cross + diag) / (mu.v * mu.v);
}

template <typename Scalar>
Mat<Scalar> conformal_ricci_tensor(const Jet<Scalar>& mu, VecRef<Scalar> axis) {
    const Eigen::Index n = axis.size();
    Mat<Scalar> ric(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) ric(i, j) = conformal_ricci<Scalar>(mu, axis, i, j);
    return ric;
}

template <typename Scalar>
Scalar conformal_scalar(const Jet<Scalar>& mu, int n) {
    return static_cast<Scalar>(n - 1) * (Scalar(2) * mu.v * mu.d2 - static_cast<Scalar>(n) * mu.d1 * mu.d1);
}

template <typename Scalar>
Scalar conformal_hessian(const Jet<Scalar>& f, const Jet<Scalar>& mu, VecRef<Scalar> axis,
                         Eigen::Index i, Eigen::Index j) {
    const Scalar aa = axis[i] * axis[j];
    const Scalar delta = (i == j) ? Scalar(1) : Scalar(0);
    return aa * f.d2 + (Scalar(2) * aa - delta) * mu.d1 * f.d1 / mu.v;
}

template <typename Scalar>
Mat<Scalar> conformal_hessian_tensor(const Jet<Scalar>& f, const Jet<Scalar>& mu,
                                     VecRef<Scalar> axis) {
    const Eigen::Index n = axis.size();
    Mat<Scalar> hess(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) hess(i, j) = conformal_hessian<Scalar>(f, mu, axis, i, j);
    return hess;
}

template <typename Scalar>
Scalar conformal_laplacian(const Jet<Scalar>& f, const Jet<Scalar>& mu, int n) {
    return mu.v * mu.v * (f.d2 - static_cast<Scalar>(n - 2) * mu.d1 * f.d1 / mu.v);
}

template <typename Scalar>
struct GradTerms {
    Scalar df_dphi{};   // grad f (phi) = <grad f, grad phi>
    Scalar grad_f_sq{}; // |grad f|^2
};

template <typename Scalar>
GradTerms<Scalar> grad_terms(const Jet<Scalar>& f, const Jet<Scalar>& phi, const Jet<Scalar>& mu) {
    const Scalar mu2 = mu.v * mu.v;
    return {mu2 * f.d1 * phi.d1, mu2 * f.d1 * f.d1};
}

/// Metric of the conformal base, mu^{-2} times the identity.
template <typename Scalar>
Mat<Scalar> conformal_metric(const Jet<Scalar>& mu, int n) {
    return Mat<Scalar>::Identity(n, n) / (mu.v * mu.v);
}

// ---------------------------------------------------------------------------
// One-dimensional base g = a(x) dx^2. Curvature of a line vanishes identically.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct LineMetric {
    Scalar a{};   // metric factor, positive
    Scalar a_x{}; // spatial derivative of the metric factor
};

template <typename Scalar>
Scalar line_christoffel(const LineMetric<Scalar>& g) {
    return g.a_x / (Scalar(2) * g.a);
}

/// The single coordinate component of the Hessian, f'' - Gamma f'.
template <typename Scalar>
Scalar line_hessian(const Jet<Scalar>& f, const LineMetric<Scalar>& g) {
    return f.d2 - line_christoffel(g) * f.d1;
}

template <typename Scalar>
Scalar line_laplacian(const Jet<Scalar>& f, const LineMetric<Scalar>& g) {
    return line_hessian(f, g) / g.a;
}

template <typename Scalar>
Scalar line_inner(const Jet<Scalar>& f, const Jet<Scalar>& h, const LineMetric<Scalar>& g) {
    return f.d1 * h.d1 / g.a;
}

/// Drifted Laplacian Delta u - <grad phi, grad u> on a line.
template <typename Scalar>
Scalar drifted_laplacian(const Jet<Scalar>& u, const Jet<Scalar>& phi, const LineMetric<Scalar>& g) {
    return line_laplacian(u, g) - line_inner(phi, u, g);
}

/// Drifted Laplacian from precomputed pieces in n dimensions: the Laplacian of
/// u, the coordinate differentials du and dphi, and the inverse metric.
template <typename Scalar>
Scalar drifted_laplacian(Scalar laplacian_u, VecRef<Scalar> du,
                         VecRef<Scalar> dphi, MatRef<Scalar> metric_inv) {
    return laplacian_u - dphi.dot(metric_inv * du);
}

/// Drifted Laplacian of grid samples at an interior node, second-order
/// centered differences; metric factor samples a > 0 on the same grid.
double drifted_laplacian(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& phi,
                         const Eigen::Ref<const Eigen::VectorXd>& metric, double step, Eigen::Index node);

// ---------------------------------------------------------------------------
// Warped products B x_f F with Einstein fiber, Ric_F = ric_coeff g_F.
// ---------------------------------------------------------------------------

template <typename Scalar = double>
struct BaseCurvature {
    Mat<Scalar> metric; // coordinate components of g
    Mat<Scalar> ricci;  // coordinate components of Ric_g
    Scalar scalar{};    // S_g
};

template <typename Scalar = double>
struct WarpingData {
    Scalar f{};
    Mat<Scalar> hessian; // coordinate components of Hess_g f
    Scalar laplacian{};
    Scalar grad_sq{};
};

struct FiberData {
    int m = 1;
    double s_fiber = 0.0;
    double ric_coeff = 0.0; // Einstein constant; s_fiber = m * ric_coeff
};

template <typename Scalar = double>
struct WarpedCurvature {
    Mat<Scalar> ric_horizontal;
    Scalar ric_vertical_coeff{}; // Ric restricted to the fiber is this times g_F
    Scalar scalar{};
};

/// Horizontal and vertical Ricci blocks and scalar curvature of g + f^2 g_F.
/// Throws PositivityError for f <= 0 and DomainError for an inconsistent fiber.
WarpedCurvature<double> warped_components(const BaseCurvature<double>& base, const WarpingData<double>& warp,
                                          const FiberData& fiber);

/// Squared norm |Rm|^2 of a conformally flat metric from its Ricci tensor and
/// scalar curvature (the Weyl part vanishes); exact for every dimension.
template <typename Scalar>
Scalar conformally_flat_rm_norm_sq(MatRef<Scalar> ricci,
                                   MatRef<Scalar> metric_inv, Scalar scalar, int n) {
    if (n <= 1) return Scalar(0);
    if (n == 2) return scalar * scalar;
    const Mat<Scalar> mixed = metric_inv * ricci;
    const Scalar ric_sq = (mixed * mixed).trace();
    return Scalar(4) / static_cast<Scalar>(n - 2) * ric_sq -
           Scalar(2) * scalar * scalar / static_cast<Scalar>((n - 1) * (n - 2));
}

/// |Rm|^2 of a warped product whose fiber is a space form of sectional
/// curvature fiber_sectional: base part, mixed planes -Hess f / f and the
/// fiber planes (k_F - |grad f|^2) / f^2.
template <typename Scalar>
Scalar warped_rm_norm_sq(Scalar base_rm_sq, MatRef<Scalar> hessian,
                         MatRef<Scalar> metric_inv, Scalar f, Scalar grad_sq, int m,
                         Scalar fiber_sectional) {
    const Mat<Scalar> mixed = metric_inv * hessian;
    const Scalar hess_sq = (mixed * mixed).trace();
    const Scalar vertical = (fiber_sectional - grad_sq) / (f * f);
    return base_rm_sq + Scalar(4 * m) * hess_sq / (f * f) +
           Scalar(2 * m * (m - 1)) * vertical * vertical;
}

// ---------------------------------------------------------------------------
// Profile-level wrappers with domain and positivity checks.
// ---------------------------------------------------------------------------

/// Unit ansatz direction in R^n and the interval I of admissible xi.
struct AnsatzFrame {
    int n = 2;
    Eigen::VectorXd axis;
    Interval domain;

    /// Throws DomainError unless |axis| = 1 to within 1e-14.
    static AnsatzFrame make(Eigen::VectorXd axis, Interval domain = {});
    /// Standard basis vector e_{n} (last coordinate).
    static AnsatzFrame last_axis(int n, Interval domain = {});

    double xi(const Eigen::Ref<const Eigen::VectorXd>& x) const { return axis.dot(x); }
};

/// The three ansatz profiles (mu, f, phi) of xi. All three share one kind.
struct ProfileSet {
    Profile mu;
    Profile f;
    Profile phi;

    struct Point {
        Jet2 mu, f, phi;
    };

    /// Throws DomainError when the kinds are mixed.
    static ProfileSet make(Profile mu, Profile f, Profile phi);

    /// Evaluates all three profiles; DomainError outside the common domain,
    /// PositivityError when mu or f is not positive.
    Point at(double xi) const;
};

double conformal_ricci(const ProfileSet& profiles, const AnsatzFrame& frame, double xi, Eigen::Index i,
                       Eigen::Index j);
double conformal_scalar(const ProfileSet& profiles, int n, double xi);
double conformal_hessian(const Profile& f, const ProfileSet& profiles, const AnsatzFrame& frame, double xi,
                         Eigen::Index i, Eigen::Index j);
double conformal_laplacian(const Profile& f, const ProfileSet& profiles, int n, double xi);
GradTerms<double> grad_terms(const Profile& f, const Profile& phi, const ProfileSet& profiles, double xi);

}  // namespace rbflow
