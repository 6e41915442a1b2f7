#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>

namespace rbflow {

/// Value together with its first two derivatives in one variable.
template <typename Scalar = double>
struct Jet {
    Scalar v{};
    Scalar d1{};
    Scalar d2{};
};

using Jet2 = Jet<double>;

/// Closed interval on the real line; infinite ends allowed.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = false;
    bool hi_open = false;

    bool contains(double x) const {
        return (lo_open ? x > lo : x >= lo) && (hi_open ? x < hi : x <= hi);
    }
    bool interior(double x) const { return x > lo && x < hi; }

    static Interval open(double lo, double hi) { return {lo, hi, true, true}; }
};

/// A scalar profile of one variable with derivative access. Either closed-form
/// (value and analytic derivatives) or sampled on a uniform grid, in which case
/// nodal derivatives come from fourth-order finite differences and off-node
/// values from the quintic Hermite interpolant of those nodal jets.
class Profile {
public:
    enum class Kind { Analytic, Sampled };

    Profile() = default;

    static Profile analytic(std::string name, std::function<Jet2(double)> eval, Interval domain = {});
    static Profile constant(double value, Interval domain = {});
    /// Samples on the uniform grid lo + i (hi - lo) / (n - 1); needs at least 5 nodes.
    static Profile sampled(std::string name, double lo, double hi, Eigen::VectorXd values);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const Interval& domain() const { return domain_; }

    /// Throws DomainError outside the declared domain.
    Jet2 eval(double x) const;
    double operator()(double x) const { return eval(x).v; }

    /// Pointwise product with a positive constant, keeping the kind.
    Profile scaled(double factor) const;

private:
    Kind kind_ = Kind::Analytic;
    std::string name_;
    Interval domain_;
    std::function<Jet2(double)> eval_;
    // sampled representation
    double lo_ = 0.0;
    double step_ = 0.0;
    Eigen::VectorXd value_, d1_, d2_;
};

/// Fourth-order first and second derivatives of uniformly spaced samples.
/// Interior nodes use centered five-point stencils, the two nodes at each end
/// one-sided six-point stencils.
void fd4_derivatives(const Eigen::Ref<const Eigen::VectorXd>& values, double step, Eigen::VectorXd& d1,
                     Eigen::VectorXd& d2);

}  // namespace rbflow
