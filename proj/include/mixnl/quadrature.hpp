#pragma once

#include "mixnl/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace mixnl::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

// Gauss-Legendre rule on [0, 1]. Rules are cached; n in [1, 64].
const Rule& gauss_legendre(int n);

/// Gauss rule on [0, 1] for the weight u^beta, beta > -1. Integrates
/// u^beta * p(u) exactly for polynomials p of degree <= 2n - 1.
Rule gauss_jacobi_left(int n, double beta);

/// Adaptive Gauss-Kronrod (G7/K15) on [a, b]. Throws QuadratureError when the
/// error estimate stays above max(rel_tol * |I|, abs_tol) or the result is
/// not finite.
template <class F>
double adaptive(F&& f, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0,
                unsigned max_depth = 15) {
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, rel_tol, &err);
    if (!std::isfinite(value) || err > std::max(100.0 * rel_tol * std::abs(value), abs_tol)) {
        throw QuadratureError("adaptive quadrature on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "] did not converge (error estimate " +
                              std::to_string(err) + ")");
    }
    return value;
}

} // namespace mixnl::quad
