#include "mixnl/frackernel.hpp"

#include "mixnl/errors.hpp"
#include "mixnl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mixnl {

namespace {

constexpr int kTailPeriods = 50;
constexpr int kTailTerms = 8;

// Integral of cos(z) z^{-alpha} over [Z, inf) for Z a multiple of 2 pi,
// from repeated integration by parts.
double oscillatory_tail(double alpha, double Z) {
    double sum = 0.0;
    double coeff = alpha;
    double power = alpha + 1.0;
    double sign = 1.0;
    for (int k = 0; k < kTailTerms; ++k) {
        sum += sign * coeff * std::pow(Z, -power);
        coeff *= power * (power + 1.0);
        power += 2.0;
        sign = -sign;
    }
    return sum;
}

double hat(const Panel& p, std::size_t node, double x) noexcept {
    if (node == p.node0) {
        return (p.x1 - x) / p.length();
    }
    if (node == p.node1) {
        return (x - p.x0) / p.length();
    }
    return 0.0;
}

PanelBlock empty_block(const Panel& e, const Panel& f) {
    PanelBlock block;
    auto add = [&](std::size_t node) {
        for (std::size_t k = 0; k < block.count; ++k) {
            if (block.node[k] == node) {
                return;
            }
        }
        block.node[block.count++] = node;
    };
    add(e.node0);
    add(e.node1);
    add(f.node0);
    add(f.node1);
    return block;
}

// value += weight * d d^T with d_a = phi_a(x) - phi_a(y), x in e, y in f.
void accumulate(PanelBlock& block, const Panel& e, const Panel& f, double x, double y, double weight) {
    std::array<double, 4> d{};
    for (std::size_t a = 0; a < block.count; ++a) {
        d[a] = hat(e, block.node[a], x) - hat(f, block.node[a], y);
    }
    for (std::size_t a = 0; a < block.count; ++a) {
        for (std::size_t b = 0; b < block.count; ++b) {
            block.value[a][b] += weight * d[a] * d[b];
        }
    }
}

// Same panel: relative coordinate r = x - y on each half of the square.
// Inner factor d d^T / r^2 is constant for P1, the r^{1-2s} weight is
// integrated by a Gauss-Jacobi rule.
void integrate_identical(const FracKernel& kernel, const Panel& e, PanelBlock& block) {
    const double h = e.length();
    const double beta = 1.0 - 2.0 * kernel.s;
    const auto radial = quad::gauss_jacobi_left(3, beta);
    const auto& along = quad::gauss_legendre(3);
    const double scale = 2.0 * kernel.c_ns * h * std::pow(h, beta);
    for (std::size_t iu = 0; iu < radial.size(); ++iu) {
        const double r = h * radial.nodes[iu];
        for (std::size_t it = 0; it < along.size(); ++it) {
            const double y = e.x0 + (h - r) * along.nodes[it];
            const double x = y + r;
            const double w = scale * radial.weights[iu] * along.weights[it] * (h - r) / (r * r);
            accumulate(block, e, e, x, y, w);
        }
    }
}

// Panels sharing one vertex: Duffy split of the (p, q) rectangle into two
// triangles collapsing at the shared vertex. The integrand is homogeneous of
// degree 1 - 2s in (p, q), so the radial direction carries the weight u^{2-2s}.
void integrate_touching(const FracKernel& kernel, const Panel& e, const Panel& f, PanelBlock& block) {
    const bool e_left = e.node1 == f.node0;
    const double vertex = e_left ? e.x1 : e.x0;
    const double he = e.length();
    const double hf = f.length();
    const double beta = 2.0 - 2.0 * kernel.s;
    const auto radial = quad::gauss_jacobi_left(3, beta);
    const auto& angular = quad::gauss_legendre(20);
    const double exponent = -1.0 - 2.0 * kernel.s;

    for (int tri = 0; tri < 2; ++tri) {
        for (std::size_t iu = 0; iu < radial.size(); ++iu) {
            const double u = radial.nodes[iu];
            for (std::size_t iv = 0; iv < angular.size(); ++iv) {
                const double v = angular.nodes[iv];
                const double p = tri == 0 ? he * u : he * u * v;
                const double q = tri == 0 ? hf * u * v : hf * u;
                const double x = e_left ? vertex - p : vertex + p;
                const double y = e_left ? vertex + q : vertex - q;
                const double w = radial.weights[iu] * angular.weights[iv] * kernel.c_ns *
                                 std::pow(p + q, exponent) * he * hf * u / std::pow(u, beta);
                accumulate(block, e, f, x, y, w);
            }
        }
    }
}

void integrate_disjoint(const FracKernel& kernel, const Panel& e, const Panel& f, int order,
                        PanelBlock& block) {
    const auto& rule = quad::gauss_legendre(order);
    const double he = e.length();
    const double hf = f.length();
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double x = e.x0 + he * rule.nodes[i];
        for (std::size_t j = 0; j < rule.size(); ++j) {
            const double y = f.x0 + hf * rule.nodes[j];
            accumulate(block, e, f, x, y, rule.weights[i] * rule.weights[j] * he * hf * kernel(x, y));
        }
    }
}

void check_finite(const PanelBlock& block, const Panel& e, const Panel& f) {
    for (std::size_t a = 0; a < block.count; ++a) {
        for (std::size_t b = 0; b < block.count; ++b) {
            if (!std::isfinite(block.value[a][b])) {
                throw QuadratureError("non-finite panel integral on [" + std::to_string(e.x0) + ", " +
                                      std::to_string(e.x1) + "] x [" + std::to_string(f.x0) + ", " +
                                      std::to_string(f.x1) + "]");
            }
        }
    }
}

} // namespace

double compute_normalization_constant(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw OrderError("fractional order s must lie in (0,1)");
    }
    const double alpha = 1.0 + 2.0 * s;
    const double two_pi = 2.0 * std::numbers::pi;

    // [0, 1] with z = t^m, m = 1 / (1 - s): z^2 t^{-1-2sm} = t, so the
    // integrand is 2 m (sin(z/2) / z)^2 t, smooth down to t = 0
    const double m = 1.0 / (1.0 - s);
    auto near = [&](double t) {
        const double z = std::pow(t, m);
        const double ratio = z > 0.0 ? std::sin(0.5 * z) / z : 0.5;
        return 2.0 * m * ratio * ratio * t;
    };
    double integral = quad::adaptive(near, 0.0, 1.0, 1e-12);

    auto far = [&](double z) { return (1.0 - std::cos(z)) * std::pow(z, -alpha); };
    integral += quad::adaptive(far, 1.0, two_pi, 1e-12);
    for (int k = 1; k < kTailPeriods; ++k) {
        integral += quad::adaptive(far, two_pi * k, two_pi * (k + 1), 1e-12);
    }
    const double Z = two_pi * kTailPeriods;
    integral += std::pow(Z, -2.0 * s) / (2.0 * s) - oscillatory_tail(alpha, Z);

    // the integrand is even
    return 1.0 / (2.0 * integral);
}

FracKernel FracKernel::make(double s, double nonlocal_weight) {
    return FracKernel{s, compute_normalization_constant(s), nonlocal_weight};
}

double FracKernel::operator()(double x, double y) const noexcept {
    return c_ns * std::pow(std::abs(x - y), -1.0 - 2.0 * s);
}

double FracKernel::far_field(double x, double R) const noexcept {
    return c_ns * (std::pow(R - x, -2.0 * s) + std::pow(R + x, -2.0 * s)) / (2.0 * s);
}

double tail_weight(const FracKernel& kernel, double x, double R, bool x_in_omega) noexcept {
    return x_in_omega ? kernel.far_field(x, R) : 0.0;
}

PanelRelation relation(const Panel& e, const Panel& f) noexcept {
    if (e.node0 == f.node0 && e.node1 == f.node1) {
        return PanelRelation::Identical;
    }
    if (e.node1 == f.node0 || e.node0 == f.node1) {
        return PanelRelation::Touching;
    }
    return PanelRelation::Disjoint;
}

int disjoint_gauss_order(double separation_ratio) noexcept {
    if (separation_ratio <= 1.0) return 10;
    if (separation_ratio <= 2.0) return 8;
    if (separation_ratio <= 4.0) return 6;
    if (separation_ratio <= 10.0) return 5;
    if (separation_ratio <= 30.0) return 4;
    return 3;
}

PanelBlock panel_interaction(const FracKernel& kernel, const Panel& e, const Panel& f, int disjoint_order) {
    PanelBlock block = empty_block(e, f);
    switch (relation(e, f)) {
    case PanelRelation::Identical: integrate_identical(kernel, e, block); break;
    case PanelRelation::Touching: integrate_touching(kernel, e, f, block); break;
    case PanelRelation::Disjoint: integrate_disjoint(kernel, e, f, disjoint_order, block); break;
    }
    check_finite(block, e, f);
    return block;
}

PanelBlock panel_interaction(const FracKernel& kernel, const Panel& e, const Panel& f) {
    const double gap = std::max(f.x0 - e.x1, e.x0 - f.x1);
    const double ratio = gap / std::max(e.length(), f.length());
    return panel_interaction(kernel, e, f, disjoint_gauss_order(ratio));
}

double kernel_panel_integral(const FracKernel& kernel, const Panel& e, const Panel& f,
                             std::size_t node_i, std::size_t node_j) {
    const auto block = panel_interaction(kernel, e, f);
    std::size_t a = block.count;
    std::size_t b = block.count;
    for (std::size_t k = 0; k < block.count; ++k) {
        if (block.node[k] == node_i) a = k;
        if (block.node[k] == node_j) b = k;
    }
    if (a == block.count || b == block.count) {
        return 0.0;
    }
    return block.value[a][b];
}

} // namespace mixnl
