#include "mixnl/errors.hpp"
#include "mixnl/frackernel.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mixnl;

TEST(NormalizationConstant, MatchesGammaFormOracle) {
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const double ref = oracle::gamma_constant(s);
        EXPECT_LE(std::abs(compute_normalization_constant(s) - ref), 1e-8 * ref) << "s=" << s;
    }
}

TEST(NormalizationConstant, HalfIsOneOverPi) {
    EXPECT_NEAR(compute_normalization_constant(0.5), 1.0 / std::numbers::pi, 1e-12);
}

TEST(NormalizationConstant, IsPositiveAcrossOrders) {
    for (double s = 0.05; s < 1.0; s += 0.1) {
        EXPECT_GT(compute_normalization_constant(s), 0.0);
    }
}

TEST(NormalizationConstant, RejectsOrdersOutsideTheUnitInterval) {
    EXPECT_THROW(compute_normalization_constant(0.0), OrderError);
    EXPECT_THROW(compute_normalization_constant(1.2), OrderError);
}

TEST(Kernel, IsSymmetricAndPositive) {
    const auto k = FracKernel::make(0.3);
    EXPECT_GT(k(0.1, 0.7), 0.0);
    EXPECT_DOUBLE_EQ(k(0.1, 0.7), k(0.7, 0.1));
}

TEST(FarField, CentreValueAtHalfOrder) {
    const auto k = FracKernel::make(0.5);
    EXPECT_NEAR(tail_weight(k, 0.0, 4.0, true), 1.0 / (2.0 * std::numbers::pi), 1e-14);
}

TEST(FarField, VanishesOutsideOmega) {
    const auto k = FracKernel::make(0.5);
    EXPECT_EQ(tail_weight(k, 1.2, 4.0, false), 0.0);
}

TEST(FarField, MatchesReferenceQuadratureOnRandomPoints) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        const double s = 0.05 + 0.9 * unit(rng);
        const double R = 2.0 + 4.0 * unit(rng);
        const double x = (2.0 * unit(rng) - 1.0) * 0.5 * R;
        const auto k = FracKernel::make(s);
        const double ref = oracle::tail_integral(k.c_ns, s, x, R);
        EXPECT_LE(std::abs(k.far_field(x, R) - ref), 1e-8 * ref) << "s=" << s << " R=" << R << " x=" << x;
    }
}

TEST(FarField, QuarterOrderAtOffCentrePoint) {
    const auto k = FracKernel::make(0.25);
    const double ref = oracle::tail_integral(k.c_ns, 0.25, 0.5, 4.0);
    EXPECT_LE(std::abs(tail_weight(k, 0.5, 4.0, true) - ref), 1e-10 * ref);
}

namespace {

Panel panel(double a, double b, std::size_t n0) { return Panel{a, b, n0, n0 + 1}; }

std::size_t index_of(const PanelBlock& b, std::size_t node) {
    for (std::size_t i = 0; i < b.count; ++i) {
        if (b.node[i] == node) return i;
    }
    return b.count;
}

} // namespace

TEST(PanelIntegral, IdenticalPanelMatchesClosedForm) {
    // phi(x) - phi(y) = (y - x) / h on one element: the integral is
    // c h^{-2} int int |x - y|^{1 - 2s} = c h^{-2} 2 h^{3-2s} / ((2-2s)(3-2s)).
    const auto k = FracKernel::make(0.5);
    const double h = 0.25;
    const double value = kernel_panel_integral(k, panel(0.0, h, 0), panel(0.0, h, 0), 0, 0);
    const double ref = oracle::gamma_constant(0.5) * 2.0 * std::pow(h, 2.0) / (1.0 * 2.0) / (h * h);
    EXPECT_GT(value, 0.0);
    EXPECT_NEAR(value, ref, 1e-12 * ref);
}

TEST(PanelIntegral, IsSymmetricInPanelsAndBasisFunctions) {
    const auto k = FracKernel::make(0.7);
    const Panel e = panel(0.0, 0.25, 0);
    const Panel touching = panel(0.25, 0.6, 1);
    const Panel far = panel(1.0, 1.5, 5);
    for (const Panel& f : {touching, far}) {
        const auto ef = panel_interaction(k, e, f);
        const auto fe = panel_interaction(k, f, e);
        for (std::size_t a = 0; a < ef.count; ++a) {
            for (std::size_t b = 0; b < ef.count; ++b) {
                const double v = ef.value[a][b];
                EXPECT_NEAR(v, ef.value[b][a], 1e-15 * std::abs(v) + 1e-300);
                const double w = fe.value[index_of(fe, ef.node[a])][index_of(fe, ef.node[b])];
                EXPECT_NEAR(v, w, 1e-13 * std::abs(v) + 1e-300);
            }
        }
    }
}

TEST(PanelIntegral, VanishesForBasisFunctionsAwayFromBothPanels) {
    const auto k = FracKernel::make(0.5);
    EXPECT_EQ(kernel_panel_integral(k, panel(0.0, 0.25, 0), panel(1.0, 1.25, 4), 9, 9), 0.0);
}

TEST(PanelIntegral, DoublingTheDisjointOrderChangesLittle) {
    for (double s : {0.25, 0.5, 0.75}) {
        const auto k = FracKernel::make(s);
        const Panel e = panel(0.0, 0.1, 0);
        for (double gap : {0.1, 0.2, 0.5, 1.0, 3.0}) {
            const Panel f = panel(0.1 + gap, 0.2 + gap, 2);
            const int order = disjoint_gauss_order(gap / 0.1);
            const auto base = panel_interaction(k, e, f, order);
            const auto fine = panel_interaction(k, e, f, 2 * order);
            for (std::size_t a = 0; a < base.count; ++a) {
                for (std::size_t b = 0; b < base.count; ++b) {
                    const double ref = fine.value[a][b];
                    EXPECT_LE(std::abs(base.value[a][b] - ref), 1e-9 * std::abs(ref))
                        << "s=" << s << " gap=" << gap;
                }
            }
        }
    }
}

TEST(PanelIntegral, GaussOrderDecreasesWithSeparation) {
    int previous = disjoint_gauss_order(0.5);
    for (double r : {1.5, 3.0, 8.0, 20.0, 50.0}) {
        const int order = disjoint_gauss_order(r);
        EXPECT_LE(order, previous);
        previous = order;
    }
    EXPECT_EQ(disjoint_gauss_order(100.0), 3);
}
