#include "mixnl/errors.hpp"
#include "mixnl/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace mixnl;

TEST(GaussLegendre, IntegratesPolynomialsUpToDegree2nMinus1) {
    for (int n : {1, 3, 8, 20}) {
        const auto& rule = quad::gauss_legendre(n);
        ASSERT_EQ(rule.size(), static_cast<std::size_t>(n));
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double sum = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                sum += rule.weights[q] * std::pow(rule.nodes[q], deg);
            }
            EXPECT_NEAR(sum, 1.0 / (deg + 1), 1e-14) << "n=" << n << " deg=" << deg;
        }
    }
}

TEST(GaussLegendre, NodesLieInsideTheUnitInterval) {
    const auto& rule = quad::gauss_legendre(12);
    for (double x : rule.nodes) {
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, 1.0);
    }
}

TEST(GaussLegendre, RejectsOrdersOutOfRange) {
    EXPECT_THROW(quad::gauss_legendre(0), QuadratureError);
    EXPECT_THROW(quad::gauss_legendre(65), QuadratureError);
}

TEST(GaussJacobi, IntegratesWeightedPolynomialsExactly) {
    for (double beta : {-0.5, 0.0, 0.5, 1.5}) {
        const auto rule = quad::gauss_jacobi_left(6, beta);
        for (int deg = 0; deg <= 11; ++deg) {
            double sum = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                sum += rule.weights[q] * std::pow(rule.nodes[q], deg);
            }
            EXPECT_NEAR(sum, 1.0 / (deg + beta + 1.0), 1e-13) << "beta=" << beta << " deg=" << deg;
        }
    }
}

TEST(GaussJacobi, RejectsInvalidWeight) {
    EXPECT_THROW(quad::gauss_jacobi_left(4, -1.0), QuadratureError);
    EXPECT_THROW(quad::gauss_jacobi_left(0, 0.5), QuadratureError);
}

TEST(Adaptive, IntegratesSmoothFunctions) {
    EXPECT_NEAR(quad::adaptive([](double x) { return std::exp(x); }, 0.0, 1.0), std::exp(1.0) - 1.0, 1e-14);
}

TEST(Adaptive, ThrowsOnNonFiniteResult) {
    auto bad = [](double) { return std::numeric_limits<double>::quiet_NaN(); };
    EXPECT_THROW(quad::adaptive(bad, 0.0, 1.0), QuadratureError);
}
