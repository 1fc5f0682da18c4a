#pragma once

#include "mixnl/assembly.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace mixnl {

// Which Omega mass pairs with the energy form in the eigenproblem.
enum class MassKind { Consistent, Lumped };

/// Eigenpair over all free DOFs, normalized to u^T M u = 1 with nonnegative
/// Omega mean. residual = |A u - lambda M u| / |A u|, falling back to
/// |A| |u| in the denominator for a (numerically) null eigenvector.
struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd vector;
    double residual = 0.0;
};

struct SolverDiagnostics {
    std::string method; // "dense" or "lanczos"
    int iterations = 0;
    double shift = 0.0;
    bool deflated_constant = false;
};

struct Spectrum {
    std::vector<EigenPair> pairs;
    int requested = 0;
    SolverDiagnostics diagnostics;
};

struct SolveOptions {
    double tol = 1e-10;
    MassKind mass = MassKind::Consistent;
    // Omega-DOF count at and above which shift-invert Lanczos replaces the dense solver.
    Eigen::Index dense_limit = 200;
    int max_krylov = 400;
};

/// Smallest eigenpairs of A u = lambda M u. The exterior (mass-free) DOFs
/// are eliminated by a Schur complement before the reduced pencil is solved;
/// in pure Neumann mode the constant null vector is deflated first.
Spectrum solve_smallest(const AssembledSystem& sys, int count, const SolveOptions& opts = {});

/// Reference solve of the unreduced pencil: M u = mu (A + sigma M) u with
/// dense generalized symmetric eigensolver, lambda = 1/mu - sigma. sigma > 0
/// is needed only when A is singular.
Spectrum solve_dense_full_pencil(const AssembledSystem& sys, int count, double sigma = 0.0,
                                 MassKind mass = MassKind::Consistent);

const Eigen::MatrixXd& mass_matrix(const AssembledSystem& sys, MassKind kind, Eigen::MatrixXd& storage);

struct PrincipalReport {
    bool pass = false;
    double min_value = 0.0;
    std::size_t min_dof = 0;
    double min_x = 0.0;
    std::size_t sign_changes = 0;
};

// Checks the given pair (default: the first) is strictly positive at every free node.
PrincipalReport check_principal(const Spectrum& sp, const Mesh1D& mesh, std::size_t pair = 0);

struct SimplicityReport {
    bool pass = false;
    double gap = 0.0;
    double relative_gap = 0.0;
};

SimplicityReport check_simplicity(const Spectrum& sp, double gap_tol = 1e-6);

struct OrthogonalityReport {
    bool pass = false;
    double energy_product = 0.0;
    double mass_product = 0.0;
};

OrthogonalityReport check_orthogonality(const Spectrum& sp, const AssembledSystem& sys,
                                        std::size_t i = 0, std::size_t j = 1, double tol = 1e-8,
                                        MassKind mass = MassKind::Consistent);

} // namespace mixnl
