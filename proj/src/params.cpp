#include "rbflow/params.hpp"

#include <cmath>
#include <string>

#include "rbflow/errors.hpp"

namespace rbflow {

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::Superlinear: return "Superlinear";
        case Regime::Linear: return "Linear";
        case Regime::Sublinear: return "Sublinear";
        case Regime::ConstantSource: return "ConstantSource";
        case Regime::Singular: return "Singular";
    }
    return "Unknown";
}

double derive_sigma(double rho, int m) {
    if (m < 1) {
        throw DomainError("params", "derive_sigma", "fiber dimension must be positive, got " + std::to_string(m));
    }
    const double md = static_cast<double>(m);
    if (std::abs((md + 1.0) * rho - 1.0) < kPoleTolerance) {
        throw PoleError("params", "derive_sigma",
                        "(m+1) rho = 1 (rho = " + std::to_string(rho) + ", m = " + std::to_string(m) +
                            "); u = f^(1/sigma) is undefined");
    }
    return (1.0 - 2.0 * md * rho) / (md - rho * md * md - md * rho);
}

Regime regime_of(double sigma) {
    if (sigma < 0.0) return Regime::Superlinear;
    if (sigma == 0.0) return Regime::Linear;
    if (sigma < 0.5) return Regime::Sublinear;
    if (sigma == 0.5) return Regime::ConstantSource;
    return Regime::Singular;
}

FlowParams FlowParams::make(double rho, int m, int n, double s_fiber) {
    if (n < 1) {
        throw DomainError("params", "FlowParams::make", "base dimension must be positive");
    }
    FlowParams p;
    p.rho = rho;
    p.m = m;
    p.n = n;
    p.s_fiber = s_fiber;
    p.sigma = derive_sigma(rho, m);
    p.a_coeff = 2.0 * m * rho;
    p.alpha_exp = 1.0 - 2.0 * p.sigma;
    p.regime = regime_of(p.sigma);
    return p;
}

UnifiedCoefficients<double> unified_coefficients(const FlowParams& params,
                                                 const Eigen::Ref<const Eigen::VectorXd>& s_base) {
    // Re-derive so a hand-assembled FlowParams still hits the pole guard.
    const double sigma = derive_sigma(params.rho, params.m);
    if (sigma == 0.0) {
        throw PoleError("params", "unified_coefficients",
                        "sigma = 0 (rho = 1/(2m)); the coefficients rho/sigma and 1/sigma are undefined");
    }
    UnifiedCoefficients<double> out;
    out.a = 2.0 * params.m * params.rho;
    out.b = (params.rho / sigma) * s_base;
    out.c = ((params.m * params.rho - 1.0) / (params.m * sigma)) * params.s_fiber;
    out.alpha = 1.0 - 2.0 * sigma;
    return out;
}

}  // namespace rbflow
