#include "mixnl/assembly.hpp"
#include "mixnl/errors.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <random>

using namespace mixnl;

namespace {

struct SmallCase {
    const char* name;
    DomainConfig cfg;
    double h;
};

DomainConfig make(double s, std::vector<Interval> neumann, double R = 4.0, bool pure = false, bool far = false) {
    DomainConfig cfg;
    cfg.fractional_order = s;
    cfg.neumann_set = std::move(neumann);
    cfg.truncation_radius = R;
    cfg.pure_neumann = pure;
    cfg.far_field_neumann = far;
    return cfg;
}

std::vector<SmallCase> small_cases() {
    return {
        {"dirichlet_s050", make(0.5, {}), 0.25},
        {"dirichlet_s025", make(0.25, {}), 0.25},
        {"dirichlet_s075", make(0.75, {}), 0.25},
        {"mixed_s050", make(0.5, {{1.0, 1.5}}, 3.0), 0.25},
        {"mixed_s025", make(0.25, {{-0.5, 0.0}}, 3.0), 0.25},
        {"mixed_s075", make(0.75, {{-0.75, 0.0}}, 3.0), 0.25},
        {"pure_neumann", make(0.5, {{-2.0, 0.0}, {1.0, 2.0}}, 2.0, true), 0.25},
        {"far_dropped", make(0.25, {{-2.0, -1.0}, {1.0, 2.0}}, 2.0, false, true), 0.25},
    };
}

double max_relative_entry_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double d = std::abs(a(i, j) - ref(i, j));
            if (ref(i, j) == 0.0) {
                if (d != 0.0) return std::numeric_limits<double>::infinity();
                continue;
            }
            worst = std::max(worst, d / std::abs(ref(i, j)));
        }
    }
    return worst;
}

AssembledSystem assemble_case(const DomainConfig& cfg, double h, double weight = 1.0) {
    return assemble(std::make_shared<const Mesh1D>(build_mesh(cfg, h)), FracKernel::make(cfg.fractional_order, weight));
}

} // namespace

TEST(Assembly, MatchesBruteForceOracleEntrywise) {
    for (const auto& c : small_cases()) {
        SCOPED_TRACE(c.name);
        const auto mesh = std::make_shared<const Mesh1D>(build_mesh(c.cfg, c.h));
        ASSERT_LE(mesh->element_count(), 16u);
        const auto sys = assemble(mesh, FracKernel::make(c.cfg.fractional_order));
        const auto ref = oracle::brute_force_assembly(*mesh, 1.0);
        EXPECT_LE(max_relative_entry_error(sys.stiffness(), ref.stiffness), 1e-10);
        EXPECT_LE(max_relative_entry_error(sys.mass, ref.mass), 1e-14);
    }
}

TEST(Assembly, NonlocalWeightScalesOnlyTheGagliardoPart) {
    const auto cfg = make(0.5, {{1.0, 1.5}});
    const auto one = assemble_case(cfg, 0.125, 1.0);
    const auto half = assemble_case(cfg, 0.125, 0.5);
    EXPECT_TRUE(one.a_local.isApprox(half.a_local, 0.0));
    EXPECT_LE((one.a_nonlocal - 2.0 * half.a_nonlocal).cwiseAbs().maxCoeff(), 1e-13 * one.a_nonlocal.cwiseAbs().maxCoeff());
}

TEST(Assembly, EnergyIsSymmetricPositiveSemidefinite) {
    for (const auto& c : small_cases()) {
        SCOPED_TRACE(c.name);
        const auto sys = assemble_case(c.cfg, 0.0625);
        const Eigen::MatrixXd a = sys.stiffness();
        EXPECT_EQ((a - a.transpose()).cwiseAbs().maxCoeff(), 0.0);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff());
    }
}

TEST(Assembly, ConstantsAreInTheKernelOnlyInPureNeumann) {
    const auto pure = assemble_case(make(0.5, {{-2.0, 0.0}, {1.0, 2.0}}, 2.0, true), 0.0625);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(pure.size());
    EXPECT_LE((pure.stiffness() * one).cwiseAbs().maxCoeff(), 1e-10 * pure.stiffness().cwiseAbs().maxCoeff());

    const auto mixed = assemble_case(make(0.5, {{1.0, 1.5}}), 0.0625);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mixed.size());
    EXPECT_GT(ones.dot(mixed.stiffness() * ones), 1e-3);
}

TEST(Assembly, MassLivesOnOmegaAndLumpedMassMatchesLength) {
    const auto sys = assemble_case(make(0.5, {{1.0, 1.5}}), 0.0625);
    for (auto i : sys.exterior_dofs()) {
        EXPECT_EQ(sys.mass.row(i).cwiseAbs().sum(), 0.0);
    }
    // the hat functions sum to 1 on Omega; only the constrained node at 0 is missing
    EXPECT_NEAR(sys.lumped_mass.sum(), 1.0 - 0.5 * 0.0625, 1e-14);
    EXPECT_NEAR(sys.lumped_mass(0), 0.0625, 1e-15);
}

TEST(Assembly, RayleighQuotientRejectsVectorsWithoutOmegaMass) {
    const auto sys = assemble_case(make(0.5, {{1.0, 1.5}}), 0.0625);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.size());
    const auto ext = sys.exterior_dofs();
    ASSERT_FALSE(ext.empty());
    u(ext.front()) = 1.0;
    EXPECT_THROW(rayleigh_quotient(sys, u), ZeroMassError);
}

TEST(Assembly, RayleighQuotientIsScaleInvariant) {
    const auto sys = assemble_case(make(0.25, {{-0.5, 0.0}}), 0.0625);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd u(sys.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = dist(rng);
    EXPECT_NEAR(rayleigh_quotient(sys, u), rayleigh_quotient(sys, -3.5 * u), 1e-12 * rayleigh_quotient(sys, u));
}

TEST(Assembly, RejectsKernelOrderMismatch) {
    const auto mesh = std::make_shared<const Mesh1D>(build_mesh(make(0.5, {}), 0.25));
    EXPECT_THROW(assemble(mesh, FracKernel::make(0.25)), AssemblyError);
}
