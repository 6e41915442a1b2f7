#include "rbflow/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rbflow/errors.hpp"

namespace rbflow {

namespace {

std::string describe_outside(const std::string& name, double x, const Interval& d) {
    std::ostringstream os;
    os.precision(17);
    os << "profile '" << name << "' evaluated at " << x << " outside [" << d.lo << ", " << d.hi << "]";
    return os.str();
}

// Quintic Hermite basis on s in [0, 1]: rows are the basis function and its
// first two s-derivatives, columns (f0, f0', f0'', f1'', f1', f1).
struct HermiteBasis {
    double b[3][6];
};

HermiteBasis hermite_basis(double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    HermiteBasis h{};
    h.b[0][0] = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    h.b[0][1] = s - 6 * s3 + 8 * s4 - 3 * s5;
    h.b[0][2] = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    h.b[0][3] = 0.5 * s3 - s4 + 0.5 * s5;
    h.b[0][4] = -4 * s3 + 7 * s4 - 3 * s5;
    h.b[0][5] = 10 * s3 - 15 * s4 + 6 * s5;

    h.b[1][0] = -30 * s2 + 60 * s3 - 30 * s4;
    h.b[1][1] = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    h.b[1][2] = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
    h.b[1][3] = 1.5 * s2 - 4 * s3 + 2.5 * s4;
    h.b[1][4] = -12 * s2 + 28 * s3 - 15 * s4;
    h.b[1][5] = 30 * s2 - 60 * s3 + 30 * s4;

    h.b[2][0] = -60 * s + 180 * s2 - 120 * s3;
    h.b[2][1] = -36 * s + 96 * s2 - 60 * s3;
    h.b[2][2] = 1 - 9 * s + 18 * s2 - 10 * s3;
    h.b[2][3] = 3 * s - 12 * s2 + 10 * s3;
    h.b[2][4] = -24 * s + 84 * s2 - 60 * s3;
    h.b[2][5] = 60 * s - 180 * s2 + 120 * s3;
    return h;
}

}  // namespace

void fd4_derivatives(const Eigen::Ref<const Eigen::VectorXd>& f, double step, Eigen::VectorXd& d1,
                     Eigen::VectorXd& d2) {
    const Eigen::Index n = f.size();
    if (n < 6) {
        throw DomainError("geometry", "fd4_derivatives", "need at least 6 samples for fourth-order stencils");
    }
    d1.resize(n);
    d2.resize(n);
    const double i12h = 1.0 / (12.0 * step);
    const double i12h2 = 1.0 / (12.0 * step * step);
    // stencils act on differences from one node so constant data gives exact zeros
    for (Eigen::Index i = 2; i + 2 < n; ++i) {
        const double m2 = f[i - 2] - f[i], m1 = f[i - 1] - f[i], p1 = f[i + 1] - f[i], p2 = f[i + 2] - f[i];
        d1[i] = (m2 - 8 * m1 + 8 * p1 - p2) * i12h;
        d2[i] = (-m2 + 16 * m1 + 16 * p1 - p2) * i12h2;
    }
    auto one_sided = [&](auto raw, double sign, Eigen::Index i0, Eigen::Index i1) {
        auto at = [&](Eigen::Index k) { return raw(k) - raw(0); };
        d1[i0] = sign * (48 * at(1) - 36 * at(2) + 16 * at(3) - 3 * at(4)) * i12h;
        d1[i1] = sign * (-10 * at(1) + 18 * at(2) - 6 * at(3) + at(4)) * i12h;
        d2[i0] = (-154 * at(1) + 214 * at(2) - 156 * at(3) + 61 * at(4) - 10 * at(5)) * i12h2;
        d2[i1] = (-15 * at(1) - 4 * at(2) + 14 * at(3) - 6 * at(4) + at(5)) * i12h2;
    };
    one_sided([&](Eigen::Index k) { return f[k]; }, 1.0, 0, 1);
    one_sided([&](Eigen::Index k) { return f[n - 1 - k]; }, -1.0, n - 1, n - 2);
}

Profile Profile::analytic(std::string name, std::function<Jet2(double)> eval, Interval domain) {
    Profile p;
    p.kind_ = Kind::Analytic;
    p.name_ = std::move(name);
    p.domain_ = domain;
    p.eval_ = std::move(eval);
    return p;
}

Profile Profile::constant(double value, Interval domain) {
    return analytic("const", [value](double) { return Jet2{value, 0.0, 0.0}; }, domain);
}

Profile Profile::sampled(std::string name, double lo, double hi, Eigen::VectorXd values) {
    if (!(hi > lo)) {
        throw DomainError("geometry", "Profile::sampled", "empty sample interval");
    }
    Profile p;
    p.kind_ = Kind::Sampled;
    p.name_ = std::move(name);
    p.domain_ = Interval{lo, hi};
    p.lo_ = lo;
    p.step_ = (hi - lo) / static_cast<double>(values.size() - 1);
    fd4_derivatives(values, p.step_, p.d1_, p.d2_);
    p.value_ = std::move(values);
    return p;
}

Jet2 Profile::eval(double x) const {
    if (!domain_.contains(x)) {
        throw DomainError("geometry", "Profile::eval", describe_outside(name_, x, domain_));
    }
    if (kind_ == Kind::Analytic) {
        return eval_(x);
    }
    const Eigen::Index last = value_.size() - 1;
    const double pos = (x - lo_) / step_;
    Eigen::Index i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(pos)), 0, last - 1);
    const double s = pos - static_cast<double>(i);
    if (s == 0.0) return {value_[i], d1_[i], d2_[i]};
    if (s == 1.0) return {value_[i + 1], d1_[i + 1], d2_[i + 1]};

    const double h = step_;
    const double coef[6] = {value_[i], h * d1_[i], h * h * d2_[i], h * h * d2_[i + 1], h * d1_[i + 1],
                            value_[i + 1]};
    const HermiteBasis basis = hermite_basis(s);
    double out[3] = {0.0, 0.0, 0.0};
    for (int r = 0; r < 3; ++r) {
        for (int k = 0; k < 6; ++k) out[r] += basis.b[r][k] * coef[k];
    }
    return {out[0], out[1] / h, out[2] / (h * h)};
}

Profile Profile::scaled(double factor) const {
    if (kind_ == Kind::Sampled) {
        Profile p = *this;
        p.value_ *= factor;
        p.d1_ *= factor;
        p.d2_ *= factor;
        return p;
    }
    auto inner = eval_;
    return analytic(name_, [inner, factor](double x) {
        const Jet2 j = inner(x);
        return Jet2{factor * j.v, factor * j.d1, factor * j.d2};
    }, domain_);
}

}  // namespace rbflow
