#include "mixnl/errors.hpp"
#include "mixnl/spectral.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <memory>
#include <numbers>
#include <random>

using namespace mixnl;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

DomainConfig config(std::vector<Interval> neumann = {}, double s = 0.5) {
    DomainConfig cfg;
    cfg.neumann_set = std::move(neumann);
    cfg.fractional_order = s;
    return cfg;
}

DomainConfig pure_neumann(double R = 2.0) {
    DomainConfig cfg;
    cfg.pure_neumann = true;
    cfg.truncation_radius = R;
    cfg.neumann_set = {{-R, 0.0}, {1.0, R}};
    return cfg;
}

AssembledSystem system(const DomainConfig& cfg, double h, double weight = 1.0) {
    return assemble(std::make_shared<const Mesh1D>(build_mesh(cfg, h)), FracKernel::make(cfg.fractional_order, weight));
}

} // namespace

TEST(SolveSmallest, LocalLimitRecoversPiSquared) {
    const auto start = std::chrono::steady_clock::now();
    const auto sys = system(config(), 1.0 / 256.0, 0.0);
    const auto sp = solve_smallest(sys, 2);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(std::abs(sp.pairs[0].lambda - kPi2) / kPi2, 1e-3);
    EXPECT_LT(std::abs(sp.pairs[1].lambda - 4.0 * kPi2) / (4.0 * kPi2), 1e-3);
    EXPECT_LT(seconds, 5.0);
    EXPECT_EQ(sp.diagnostics.method, "lanczos");
}

TEST(SolveSmallest, NonlocalTermRaisesTheFirstEigenvalue) {
    const auto coarse = system(config(), 1.0 / 32.0);
    const double reference = solve_dense_full_pencil(coarse, 1).pairs[0].lambda;
    EXPECT_NEAR(solve_smallest(coarse, 1).pairs[0].lambda, reference, 1e-10 * reference);
    const double fine = solve_smallest(system(config(), 1.0 / 256.0), 1).pairs[0].lambda;
    EXPECT_GT(fine, kPi2);
    EXPECT_GT(reference, kPi2);
}

TEST(SolveSmallest, PureNeumannHasConstantNullVector) {
    const auto sys = system(pure_neumann(), 1.0 / 32.0);
    const auto sp = solve_smallest(sys, 2);
    EXPECT_TRUE(sp.diagnostics.deflated_constant);
    EXPECT_LE(std::abs(sp.pairs[0].lambda), 1e-8 * sp.pairs[1].lambda);
    const auto& v = sp.pairs[0].vector;
    const double mean = v.mean();
    EXPECT_GT(mean, 0.0);
    EXPECT_LE((v.array() - mean).abs().maxCoeff(), 1e-6 * mean);
}

TEST(SolveSmallest, SchurReductionMatchesTheFullPencil) {
    for (const auto& cfg : {config({{1.0, 1.5}}), config({{-0.5, 0.0}, {1.25, 2.0}}, 0.25), config({{1.0, 1.5}}, 0.75)}) {
        const auto sys = system(cfg, 1.0 / 16.0);
        const auto full = solve_dense_full_pencil(sys, 3);
        SolveOptions dense;
        SolveOptions lanczos;
        lanczos.dense_limit = 1;
        const auto a = solve_smallest(sys, 3, dense);
        const auto b = solve_smallest(sys, 3, lanczos);
        EXPECT_EQ(a.diagnostics.method, "dense");
        EXPECT_EQ(b.diagnostics.method, "lanczos");
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(a.pairs[i].lambda, full.pairs[i].lambda, 1e-10 * full.pairs[i].lambda);
            EXPECT_NEAR(b.pairs[i].lambda, full.pairs[i].lambda, 1e-10 * full.pairs[i].lambda);
        }
    }
}

TEST(SolveSmallest, PairsAreNormalizedOrderedAndAccurate) {
    const auto sys = system(config({{1.0, 1.5}}), 1.0 / 32.0);
    const auto sp = solve_smallest(sys, 4);
    ASSERT_EQ(sp.pairs.size(), 4u);
    for (std::size_t i = 0; i < sp.pairs.size(); ++i) {
        const auto& p = sp.pairs[i];
        EXPECT_NEAR(p.vector.dot(sys.mass * p.vector), 1.0, 1e-12);
        EXPECT_LE(p.residual, 1e-10);
        if (i > 0) EXPECT_GE(p.lambda, sp.pairs[i - 1].lambda);
        for (std::size_t j = 0; j < i; ++j) {
            EXPECT_LE(std::abs(p.vector.dot(sys.mass * sp.pairs[j].vector)), 1e-8);
        }
    }
}

TEST(SolveSmallest, RayleighQuotientIsMinimizedByTheFirstPair) {
    const auto sys = system(config({{1.0, 1.5}}), 1.0 / 32.0);
    const auto sp = solve_smallest(sys, 1);
    const double lambda1 = sp.pairs[0].lambda;
    EXPECT_NEAR(rayleigh_quotient(sys, sp.pairs[0].vector), lambda1, 1e-10 * lambda1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Eigen::VectorXd v(sys.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
        EXPECT_GE(rayleigh_quotient(sys, v), lambda1 * (1.0 - 1e-9));
    }
}

TEST(SolveSmallest, GrowingTheDirichletSetRaisesLambda1) {
    const double h = 1.0 / 32.0;
    const double big = solve_smallest(system(config({{1.0, 2.0}, {-1.0, 0.0}}), h), 1).pairs[0].lambda;
    const double mid = solve_smallest(system(config({{1.0, 1.5}}), h), 1).pairs[0].lambda;
    const double none = solve_smallest(system(config(), h), 1).pairs[0].lambda;
    EXPECT_LE(big, mid + 1e-10);
    EXPECT_LE(mid, none + 1e-10);
    EXPECT_GT(big, 0.0);
}

TEST(SolveSmallest, RejectsBadCounts) {
    const auto sys = system(config(), 0.25);
    EXPECT_THROW(solve_smallest(sys, 0), SolverError);
    EXPECT_THROW(solve_smallest(sys, 10), SolverError);
}

TEST(CheckPrincipal, FirstPairIsPositiveSecondChangesSign) {
    const auto sys = system(config({{1.0, 1.5}}), 1.0 / 32.0);
    const auto sp = solve_smallest(sys, 2);
    const auto first = check_principal(sp, *sys.mesh);
    EXPECT_TRUE(first.pass);
    EXPECT_GT(first.min_value, 0.0);
    const auto second = check_principal(sp, *sys.mesh, 1);
    EXPECT_FALSE(second.pass);
    EXPECT_GT(second.sign_changes, 0u);
}

TEST(CheckPrincipal, PureNeumannConstantPasses) {
    const auto sys = system(pure_neumann(), 1.0 / 16.0);
    EXPECT_TRUE(check_principal(solve_smallest(sys, 2), *sys.mesh).pass);
}

TEST(CheckSimplicity, ClassicalGapInTheLocalLimit) {
    const auto sp = solve_smallest(system(config(), 1.0 / 128.0, 0.0), 2);
    const auto rep = check_simplicity(sp);
    EXPECT_TRUE(rep.pass);
    EXPECT_NEAR(rep.gap, 3.0 * kPi2, 0.01 * 3.0 * kPi2);
}

TEST(CheckSimplicity, MixedAndPureNeumannHaveAGap) {
    EXPECT_TRUE(check_simplicity(solve_smallest(system(config({{1.0, 1.5}}), 1.0 / 32.0), 2)).pass);
    const auto pn = solve_smallest(system(pure_neumann(), 1.0 / 16.0), 2);
    EXPECT_GT(pn.pairs[1].lambda, 0.0);
    EXPECT_THROW(check_simplicity(solve_smallest(system(config(), 1.0 / 16.0), 1)), SolverError);
}

TEST(CheckOrthogonality, FirstTwoPairsAreOrthogonalInBothProducts) {
    const auto sys = system(config({{1.0, 1.5}}), 1.0 / 32.0);
    const auto sp = solve_smallest(sys, 2);
    const auto rep = check_orthogonality(sp, sys);
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(std::abs(rep.energy_product), 1e-8);
    EXPECT_LE(std::abs(rep.mass_product), 1e-8);
    const auto self = check_orthogonality(sp, sys, 1, 1);
    EXPECT_NEAR(self.mass_product, 1.0, 1e-12);
    EXPECT_NEAR(self.energy_product, sp.pairs[1].lambda, 1e-9 * sp.pairs[1].lambda);
}

TEST(MassKind, LumpedPencilIsCloseToConsistent) {
    const auto sys = system(config({{1.0, 1.5}}), 1.0 / 64.0);
    SolveOptions lumped;
    lumped.mass = MassKind::Lumped;
    const double a = solve_smallest(sys, 1).pairs[0].lambda;
    const double b = solve_smallest(sys, 1, lumped).pairs[0].lambda;
    EXPECT_NEAR(a, b, 1e-2 * a);
    EXPECT_NEAR(solve_dense_full_pencil(sys, 1, 0.0, MassKind::Lumped).pairs[0].lambda, b, 1e-10 * b);
}
