#include "rbflow/geometry.hpp"

#include <cmath>
#include <string>

#include "rbflow/errors.hpp"

namespace rbflow {

double drifted_laplacian(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& phi,
                         const Eigen::Ref<const Eigen::VectorXd>& metric, double step, Eigen::Index node) {
    if (node < 1 || node + 1 >= u.size()) {
        throw DomainError("geometry", "drifted_laplacian", "node " + std::to_string(node) + " is not interior");
    }
    if (!(metric[node] > 0.0)) {
        throw DomainError("geometry", "drifted_laplacian", "metric factor not positive at node");
    }
    auto jet = [&](const Eigen::Ref<const Eigen::VectorXd>& w) {
        return Jet2{w[node], (w[node + 1] - w[node - 1]) / (2.0 * step),
                    (w[node + 1] - 2.0 * w[node] + w[node - 1]) / (step * step)};
    };
    const LineMetric<double> g{metric[node], (metric[node + 1] - metric[node - 1]) / (2.0 * step)};
    return drifted_laplacian(jet(u), jet(phi), g);
}

WarpedCurvature<double> warped_components(const BaseCurvature<double>& base, const WarpingData<double>& warp,
                                          const FiberData& fiber) {
    if (!(warp.f > 0.0)) {
        throw PositivityError("geometry", "warped_components", "warping function must be positive");
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(fiber.s_fiber));
    if (std::abs(fiber.s_fiber - fiber.m * fiber.ric_coeff) > tol) {
        throw DomainError("geometry", "warped_components", "fiber scalar curvature must equal m times its Einstein constant");
    }
    const double m = fiber.m;
    const double f = warp.f;
    WarpedCurvature<double> out;
    out.ric_horizontal = base.ricci - (m / f) * warp.hessian;
    out.ric_vertical_coeff = fiber.ric_coeff - (f * warp.laplacian + (m - 1.0) * warp.grad_sq);
    out.scalar = base.scalar + fiber.s_fiber / (f * f) - 2.0 * m * warp.laplacian / f -
                 m * (m - 1.0) * warp.grad_sq / (f * f);
    return out;
}

AnsatzFrame AnsatzFrame::make(Eigen::VectorXd axis, Interval domain) {
    if (axis.size() < 1) {
        throw DomainError("geometry", "AnsatzFrame::make", "axis must have at least one component");
    }
    if (std::abs(axis.norm() - 1.0) > 1e-14) {
        throw DomainError("geometry", "AnsatzFrame::make", "ansatz axis must be a unit vector");
    }
    AnsatzFrame frame;
    frame.n = static_cast<int>(axis.size());
    frame.axis = std::move(axis);
    frame.domain = domain;
    return frame;
}

AnsatzFrame AnsatzFrame::last_axis(int n, Interval domain) {
    Eigen::VectorXd axis = Eigen::VectorXd::Zero(n);
    axis[n - 1] = 1.0;
    return make(std::move(axis), domain);
}

ProfileSet ProfileSet::make(Profile mu, Profile f, Profile phi) {
    if (mu.kind() != f.kind() || mu.kind() != phi.kind()) {
        throw DomainError("geometry", "ProfileSet::make",
                          "closed-form and sampled profiles cannot be mixed in one profile set");
    }
    return ProfileSet{std::move(mu), std::move(f), std::move(phi)};
}

ProfileSet::Point ProfileSet::at(double xi) const {
    Point p;
    p.mu = mu.eval(xi);
    if (!(p.mu.v > 0.0)) {
        throw PositivityError("geometry", "ProfileSet::at", "mu must be positive at xi = " + std::to_string(xi));
    }
    p.f = f.eval(xi);
    if (!(p.f.v > 0.0)) {
        throw PositivityError("geometry", "ProfileSet::at", "f must be positive at xi = " + std::to_string(xi));
    }
    p.phi = phi.eval(xi);
    return p;
}

namespace {

void check_index(const char* op, Eigen::Index i, Eigen::Index j, int n) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
        throw DomainError("geometry", op, "tensor index out of range");
    }
}

}  // namespace

double conformal_ricci(const ProfileSet& profiles, const AnsatzFrame& frame, double xi, Eigen::Index i,
                       Eigen::Index j) {
    check_index("conformal_ricci", i, j, frame.n);
    return conformal_ricci<double>(profiles.at(xi).mu, frame.axis, i, j);
}

double conformal_scalar(const ProfileSet& profiles, int n, double xi) {
    return conformal_scalar<double>(profiles.at(xi).mu, n);
}

double conformal_hessian(const Profile& f, const ProfileSet& profiles, const AnsatzFrame& frame, double xi,
                         Eigen::Index i, Eigen::Index j) {
    check_index("conformal_hessian", i, j, frame.n);
    return conformal_hessian<double>(f.eval(xi), profiles.at(xi).mu, frame.axis, i, j);
}

double conformal_laplacian(const Profile& f, const ProfileSet& profiles, int n, double xi) {
    return conformal_laplacian<double>(f.eval(xi), profiles.at(xi).mu, n);
}

GradTerms<double> grad_terms(const Profile& f, const Profile& phi, const ProfileSet& profiles, double xi) {
    return grad_terms<double>(f.eval(xi), phi.eval(xi), profiles.at(xi).mu);
}

}  // namespace rbflow
