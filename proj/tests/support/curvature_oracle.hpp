#pragma once

// Brute-force curvature of a metric given as a matrix-valued function of the
// coordinates. Christoffel symbols from centered differences of g, Ricci from
// centered differences of the Christoffel symbols. Independent of the closed
// forms in rbflow/geometry.hpp.

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace oracle {

using Metric = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// gamma[k](i, j) = Gamma^k_ij
inline std::vector<Eigen::MatrixXd> christoffel(const Metric& g, const Eigen::VectorXd& x, double h) {
    const auto n = x.size();
    std::vector<Eigen::MatrixXd> dg(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        Eigen::VectorXd xp = x, xm = x;
        xp[l] += h;
        xm[l] -= h;
        dg[l] = (g(xp) - g(xm)) / (2.0 * h);
    }
    const Eigen::MatrixXd ginv = g(x).inverse();
    std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                double s = 0.0;
                for (Eigen::Index l = 0; l < n; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gamma[k](i, j) = 0.5 * s;
            }
    return gamma;
}

inline Eigen::MatrixXd ricci(const Metric& g, const Eigen::VectorXd& x, double h = 1e-4, double H = 1e-3) {
    const auto n = x.size();
    const auto gam = christoffel(g, x, h);
    // dgam[l][k](i, j) = d_l Gamma^k_ij
    std::vector<std::vector<Eigen::MatrixXd>> dgam(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        Eigen::VectorXd xp = x, xm = x;
        xp[l] += H;
        xm[l] -= H;
        const auto gp = christoffel(g, xp, h), gm = christoffel(g, xm, h);
        for (Eigen::Index k = 0; k < n; ++k) dgam[l].push_back((gp[k] - gm[k]) / (2.0 * H));
    }
    Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                s += dgam[k][k](i, j) - dgam[j][k](i, k);
                for (Eigen::Index l = 0; l < n; ++l) s += gam[k](k, l) * gam[l](i, j) - gam[k](j, l) * gam[l](i, k);
            }
            ric(i, j) = s;
        }
    return ric;
}

inline double scalar(const Metric& g, const Eigen::VectorXd& x, double h = 1e-4, double H = 1e-3) {
    return (g(x).inverse() * ricci(g, x, h, H)).trace();
}

}  // namespace oracle
