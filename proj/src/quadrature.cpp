#include "mixnl/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <mutex>

namespace mixnl::quad {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1, 1].
Rule golub_welsch_jacobi(int n, double alpha, double beta) {
    Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * k + ab;
        jm(k, k) = (k == 0) ? (beta - alpha) / (ab + 2.0)
                            : (beta * beta - alpha * alpha) / (t * (t + 2.0));
        if (k + 1 < n) {
            const double m = k + 1.0;
            const double tm = 2.0 * m + ab;
            const double off = std::sqrt(4.0 * m * (m + alpha) * (m + beta) * (m + ab) /
                                         (tm * tm * (tm + 1.0) * (tm - 1.0)));
            jm(k, k + 1) = off;
            jm(k + 1, k) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
    const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                       std::tgamma(ab + 2.0);
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

} // namespace

const Rule& gauss_legendre(int n) {
    constexpr int kMax = 64;
    static std::array<Rule, kMax + 1> cache;
    static std::array<std::once_flag, kMax + 1> flags;
    if (n < 1 || n > kMax) {
        throw QuadratureError("Gauss-Legendre order out of range: " + std::to_string(n));
    }
    std::call_once(flags[n], [n] {
        Rule r = golub_welsch_jacobi(n, 0.0, 0.0);
        for (int k = 0; k < n; ++k) {
            r.nodes[k] = 0.5 * (r.nodes[k] + 1.0);
            r.weights[k] *= 0.5;
        }
        cache[n] = std::move(r);
    });
    return cache[n];
}

Rule gauss_jacobi_left(int n, double beta) {
    if (n < 1 || !(beta > -1.0)) {
        throw QuadratureError("invalid Gauss-Jacobi request");
    }
    Rule r = golub_welsch_jacobi(n, 0.0, beta);
    const double scale = std::pow(2.0, -beta - 1.0);
    for (int k = 0; k < n; ++k) {
        r.nodes[k] = 0.5 * (r.nodes[k] + 1.0);
        r.weights[k] *= scale;
    }
    return r;
}

} // namespace mixnl::quad
