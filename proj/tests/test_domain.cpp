#include "mixnl/domain.hpp"
#include "mixnl/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace mixnl;

namespace {

DomainConfig mixed(std::vector<Interval> neumann = {{1.0, 1.5}}) {
    DomainConfig cfg;
    cfg.neumann_set = std::move(neumann);
    return cfg;
}

DomainConfig pure_neumann() {
    DomainConfig cfg;
    cfg.pure_neumann = true;
    cfg.neumann_set = {{-4.0, 0.0}, {1.0, 4.0}};
    return cfg;
}

std::size_t node_at(const Mesh1D& mesh, double x) {
    const auto it = std::find_if(mesh.nodes.begin(), mesh.nodes.end(), [x](double v) { return std::abs(v - x) < 1e-12; });
    EXPECT_NE(it, mesh.nodes.end()) << "no node at " << x;
    return static_cast<std::size_t>(it - mesh.nodes.begin());
}

} // namespace

TEST(ValidateConfig, AcceptsMixedDemo) {
    const auto cfg = mixed();
    EXPECT_NO_THROW(validate_config(cfg));
    EXPECT_EQ(&validate_config(cfg), &cfg);
}

TEST(ValidateConfig, RejectsNeumannIntervalOverlappingOmega) {
    EXPECT_THROW(validate_config(mixed({{0.5, 1.5}})), OverlapError);
}

TEST(ValidateConfig, RejectsOverlappingNeumannIntervals) {
    EXPECT_THROW(validate_config(mixed({{1.0, 1.5}, {1.4, 2.0}})), OverlapError);
}

TEST(ValidateConfig, RejectsOrderOutOfRange) {
    auto cfg = mixed({});
    cfg.fractional_order = 1.2;
    EXPECT_THROW(validate_config(cfg), OrderError);
    cfg.fractional_order = 0.0;
    EXPECT_THROW(validate_config(cfg), OrderError);
}

TEST(ValidateConfig, RejectsTruncationViolations) {
    auto cfg = mixed({{1.0, 4.5}});
    EXPECT_THROW(validate_config(cfg), TruncationError);
    cfg = mixed({});
    cfg.truncation_radius = 1.5; // omega not inside B_{R/2}
    EXPECT_THROW(validate_config(cfg), TruncationError);
}

TEST(ValidateConfig, PureNeumannNeedsTheWholeExterior) {
    EXPECT_NO_THROW(validate_config(pure_neumann()));
    auto cfg = pure_neumann();
    cfg.neumann_set = {{-4.0, 0.0}, {1.0, 3.0}};
    EXPECT_THROW(validate_config(cfg), ConfigError);
}

TEST(BuildMesh, AssignsBoundaryRolesByAdjacency) {
    const auto mesh = build_mesh(mixed({{1.0, 1.25}}), 0.25);
    EXPECT_EQ(mesh.node_role[node_at(mesh, 1.0)], NodeRole::OmegaBoundaryNeumann);
    EXPECT_EQ(mesh.node_role[node_at(mesh, 0.0)], NodeRole::OmegaBoundaryDirichlet);
    EXPECT_EQ(mesh.node_role[node_at(mesh, 1.25)], NodeRole::DirichletSet);
}

TEST(BuildMesh, PureNeumannHasNoConstrainedNode) {
    const auto mesh = build_mesh(pure_neumann(), 0.25);
    for (auto role : mesh.node_role) {
        EXPECT_FALSE(is_constrained(role));
    }
    EXPECT_EQ(free_dof_count(mesh), mesh.node_count());
}

TEST(BuildMesh, FullDirichletFreeDofsAreTheInteriorOmegaNodes) {
    const auto mesh = build_mesh(mixed({}), 1.0 / 16.0);
    const auto interior = std::count(mesh.node_role.begin(), mesh.node_role.end(), NodeRole::OmegaInterior);
    EXPECT_EQ(free_dof_count(mesh), static_cast<std::size_t>(interior));
    EXPECT_EQ(interior, 15);
}

TEST(BuildMesh, FreeDofCountsOfSmallExamples) {
    EXPECT_EQ(free_dof_count(build_mesh(mixed({}), 0.25)), 3u);
    EXPECT_EQ(free_dof_count(build_mesh(mixed(), 0.25)), 5u);
}

TEST(BuildMesh, RegionBoundariesAreNodesAndElementsStayInOneRegion) {
    const auto cfg = mixed({{-0.75, -0.25}, {1.0, 1.5}});
    const auto mesh = build_mesh(cfg, 0.1);
    for (double x : {-4.0, -0.75, -0.25, 0.0, 1.0, 1.5, 4.0}) {
        node_at(mesh, x);
    }
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double mid = 0.5 * (mesh.element_left(e) + mesh.element_right(e));
        Region expected = Region::Dirichlet;
        if (cfg.omega.contains_open(mid)) expected = Region::Omega;
        for (const auto& n : cfg.neumann_set) {
            if (n.contains_open(mid)) expected = Region::Neumann;
        }
        EXPECT_EQ(mesh.element_region[e], expected) << "element " << e;
    }
}

TEST(BuildMesh, ElementSizesRespectTargetAndGrading) {
    const double h = 0.1;
    const auto mesh = build_mesh(mixed({{-0.75, -0.25}, {1.0, 1.5}}), h);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        EXPECT_GT(mesh.element_length(e), 0.0);
        if (mesh.element_region[e] != Region::Dirichlet) {
            EXPECT_LE(mesh.element_length(e), h * (1.0 + 1e-12));
        } else if (e > 0 && mesh.element_region[e - 1] == Region::Dirichlet) {
            const double ratio = mesh.element_length(e) / mesh.element_length(e - 1);
            EXPECT_LE(std::max(ratio, 1.0 / ratio), kMaxGrading + 1e-12);
        }
    }
}

TEST(BuildMesh, NeumannElementsResolveANarrowDirichletGap) {
    // Neumann (1, 1.2), Dirichlet gap (1.2, 1.25), Neumann (1.25, 2)
    const auto mesh = build_mesh(mixed({{1.0, 1.2}, {1.25, 2.0}}), 0.1);
    const auto gap_right = node_at(mesh, 1.25);
    EXPECT_LE(mesh.element_length(gap_right), 0.05 / kGapResolution + 1e-12);
    const auto gap_left = node_at(mesh, 1.2);
    EXPECT_LE(mesh.element_length(gap_left - 1), 0.05 / kGapResolution + 1e-12);
}

TEST(BuildMesh, RefinementKeepsRegionBoundaryNodes) {
    const auto cfg = mixed({{-0.75, -0.25}, {1.0, 1.5}});
    const auto coarse = build_mesh(cfg, 0.1);
    const auto fine = build_mesh(cfg, 0.05);
    for (double x : {-0.75, -0.25, 0.0, 1.0, 1.5}) {
        EXPECT_EQ(coarse.nodes[node_at(coarse, x)], fine.nodes[node_at(fine, x)]);
    }
}

TEST(BuildMesh, IsDeterministic) {
    const auto cfg = mixed({{-0.75, -0.25}, {1.0, 1.5}});
    const auto a = build_mesh(cfg, 0.07);
    const auto b = build_mesh(cfg, 0.07);
    EXPECT_EQ(a.nodes, b.nodes);
    EXPECT_EQ(a.node_role, b.node_role);
    EXPECT_EQ(a.free_dof, b.free_dof);
}

TEST(BuildMesh, FreeDofMapIsContiguousAndInvertible) {
    const auto mesh = build_mesh(mixed(), 0.1);
    for (std::size_t d = 0; d < mesh.dof_node.size(); ++d) {
        EXPECT_EQ(mesh.free_dof[mesh.dof_node[d]], static_cast<int>(d));
    }
    for (std::size_t n = 0; n < mesh.node_count(); ++n) {
        EXPECT_EQ(mesh.free_dof[n] < 0, is_constrained(mesh.node_role[n]));
    }
}

TEST(BuildMesh, RefusesDegenerateIntervals) {
    EXPECT_THROW(build_mesh(mixed({{1.0, 1.005}}), 0.1), DegenerateRegion);
    EXPECT_THROW(build_mesh(mixed(), 0.0), ConfigError);
}

TEST(BuildMesh, AdjacentNeumannIntervalsShareANeumannNode) {
    const auto mesh = build_mesh(mixed({{1.0, 1.25}, {1.25, 1.5}}), 0.125);
    EXPECT_EQ(mesh.node_role[node_at(mesh, 1.25)], NodeRole::NeumannSet);
}

TEST(BuildMesh, FarFieldNeumannFreesTheOuterNodes) {
    auto cfg = mixed({{-4.0, -1.0}, {1.0, 4.0}});
    cfg.far_field_neumann = true;
    const auto mesh = build_mesh(cfg, 0.25);
    EXPECT_EQ(mesh.node_role.front(), NodeRole::NeumannSet);
    EXPECT_EQ(mesh.node_role.back(), NodeRole::NeumannSet);
}
