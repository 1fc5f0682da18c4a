#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace mixnl {

struct Interval {
    double a = 0.0;
    double b = 0.0;

    double length() const noexcept { return b - a; }
    bool contains_open(double x) const noexcept { return a < x && x < b; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Partition of the line into the open interval Omega, a finite union of
/// Neumann intervals and the implicit Dirichlet remainder, truncated to the
/// computational ball (-R, R).
///
/// `far_field_neumann` selects what happens beyond |x| = R. When false (the
/// default) the far field is Dirichlet and its interaction with Omega is
/// added in closed form. When true the far field is dropped and the problem
/// lives on (-R, R); `pure_neumann` is the special case where in addition
/// every point of (-R, R) outside Omega is Neumann.
struct DomainConfig {
    Interval omega{0.0, 1.0};
    std::vector<Interval> neumann_set;
    double truncation_radius = 4.0;
    double fractional_order = 0.5;
    bool pure_neumann = false;
    bool far_field_neumann = false;

    bool far_field_dropped() const noexcept { return pure_neumann || far_field_neumann; }
    friend bool operator==(const DomainConfig&, const DomainConfig&) = default;
};

// Throws OverlapError, TruncationError or OrderError; returns cfg unchanged otherwise.
const DomainConfig& validate_config(const DomainConfig& cfg);

enum class Region { Omega, Neumann, Dirichlet };

enum class NodeRole {
    OmegaInterior,
    OmegaBoundaryNeumann,
    OmegaBoundaryDirichlet,
    NeumannSet,
    DirichletSet,
};

std::string_view to_string(NodeRole role) noexcept;
std::string_view to_string(Region region) noexcept;

inline bool is_constrained(NodeRole role) noexcept {
    return role == NodeRole::DirichletSet || role == NodeRole::OmegaBoundaryDirichlet;
}

// Nodes whose hat function carries Omega mass.
inline bool is_omega_supported(NodeRole role) noexcept {
    return role == NodeRole::OmegaInterior || role == NodeRole::OmegaBoundaryNeumann;
}

/// P1 mesh of [-R, R]. Element e joins nodes e and e + 1.
struct Mesh1D {
    std::vector<double> nodes;
    std::vector<Region> element_region;
    std::vector<NodeRole> node_role;
    std::vector<int> free_dof;         // per node, -1 when constrained
    std::vector<std::size_t> dof_node; // inverse of free_dof
    DomainConfig config;
    double target_h = 0.0;

    std::size_t element_count() const noexcept { return element_region.size(); }
    std::size_t node_count() const noexcept { return nodes.size(); }
    double element_left(std::size_t e) const { return nodes[e]; }
    double element_right(std::size_t e) const { return nodes[e + 1]; }
    double element_length(std::size_t e) const { return nodes[e + 1] - nodes[e]; }
};

Mesh1D build_mesh(const DomainConfig& cfg, double target_h);

std::size_t free_dof_count(const Mesh1D& mesh) noexcept;

// Maximum growth ratio of consecutive element sizes in the Dirichlet remainder.
inline constexpr double kMaxGrading = 1.5;

// Neumann elements next to a Dirichlet gap of length g are at most g / kGapResolution long.
inline constexpr double kGapResolution = 4.0;

} // namespace mixnl
