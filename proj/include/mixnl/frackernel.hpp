#pragma once

#include <array>
#include <cstddef>

namespace mixnl {

/// Normalization constant C_{1,s} of the one-dimensional fractional
/// Laplacian: the inverse of the integral of (1 - cos z) / |z|^{1+2s} over
/// the real line. Evaluated by adaptive quadrature; the oscillatory tail is
/// summed from its asymptotic expansion.
double compute_normalization_constant(double s);

/// Kernel K(x, y) = c_ns |x - y|^{-(1+2s)} of the fractional Laplacian.
struct FracKernel {
    double s = 0.5;
    double c_ns = 0.0;
    double nonlocal_weight = 1.0;

    static FracKernel make(double s, double nonlocal_weight = 1.0);

    double operator()(double x, double y) const noexcept;

    // c_ns times the integral of |x - y|^{-(1+2s)} over |y| > R, for |x| < R.
    double far_field(double x, double R) const noexcept;
};

/// Far-field weight at x. Only pairs with one point in Omega belong to the
/// interaction set, so points outside Omega get 0.
double tail_weight(const FracKernel& kernel, double x, double R, bool x_in_omega) noexcept;

/// A mesh element seen as a quadrature panel: interval [x0, x1] carrying the
/// hat functions of mesh nodes `node0` (left) and `node1` (right).
struct Panel {
    double x0;
    double x1;
    std::size_t node0;
    std::size_t node1;

    double length() const noexcept { return x1 - x0; }
};

/// Interaction of two panels: for the distinct nodes of E and F (up to 4)
/// entry (a, b) is the double integral over E x F of
/// (phi_a(x) - phi_a(y)) (phi_b(x) - phi_b(y)) K(x, y).
struct PanelBlock {
    std::array<std::size_t, 4> node{};
    std::size_t count = 0;
    std::array<std::array<double, 4>, 4> value{};
};

enum class PanelRelation { Identical, Touching, Disjoint };

PanelRelation relation(const Panel& e, const Panel& f) noexcept;

/// Gauss order per direction for disjoint panels, decreasing with the
/// separation measured in units of the larger panel.
int disjoint_gauss_order(double separation_ratio) noexcept;

PanelBlock panel_interaction(const FracKernel& kernel, const Panel& e, const Panel& f);

// As above with a fixed Gauss order for disjoint panels (refinement studies).
PanelBlock panel_interaction(const FracKernel& kernel, const Panel& e, const Panel& f,
                             int disjoint_order);

/// Single entry of the panel interaction for global nodes i and j; zero when
/// neither panel carries either hat function.
double kernel_panel_integral(const FracKernel& kernel, const Panel& e, const Panel& f,
                             std::size_t node_i, std::size_t node_j);

} // namespace mixnl
