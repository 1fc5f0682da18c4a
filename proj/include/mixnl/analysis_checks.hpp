#pragma once

#include "mixnl/assembly.hpp"
#include "mixnl/spectral.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace mixnl {

/// Outcome of one verification. margin >= 0 means the checked inequality
/// holds with that much room (in the check's own normalization); witness
/// names where the worst margin was attained.
struct CheckReport {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::string witness;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
};

/// Energy lower bound v^T A v >= lambda1 v^T M v for `trials` random v,
/// margin = min (v^T A v - lambda1 v^T M v) / v^T A v, tolerance 1e-9.
/// The report also records the relative defect at v = phi1 under
/// params["saturation"], which must be <= 1e-10.
CheckReport picone_check(const AssembledSystem& sys, const Spectrum& sp, int trials, std::uint64_t seed);

/// Solves A u = M w for `trials` random loads w >= 0 and checks
/// min u >= -1e-10 |u|_inf. margin = min over trials of min u / |u|_inf.
CheckReport weak_max_principle_check(const AssembledSystem& sys, int trials, std::uint64_t seed);

/// Unit load at the Omega node closest to the middle of Omega; passes when
/// the solution is strictly positive at every free node. margin = min u / |u|_inf.
CheckReport single_node_load_check(const AssembledSystem& sys);

/// Solution of A u = M w (throws SingularBlockError when A is not definite).
Eigen::VectorXd solve_load(const AssembledSystem& sys, const Eigen::VectorXd& w);

/// Pointwise Neumann identity u(x) = int_Omega u K dy / int_Omega K dy at
/// the free Neumann nodes, evaluated exactly for the P1 interpolant of u on
/// Omega. Returns max |rhs - u(x)| / |u|_inf over those nodes; 0 when there
/// are none.
double neumann_reconstruction_discrepancy(const AssembledSystem& sys, const Eigen::VectorXd& u);

// margin is the discrepancy of phi1 (always passes when finite).
CheckReport neumann_reconstruction_check(const AssembledSystem& sys, const Spectrum& sp);

/// Discrepancy at h and h/2 for the configuration; passes when it decreases.
CheckReport reconstruction_refinement_check(const DomainConfig& cfg, double h, double nonlocal_weight = 1.0);

/// Best discrete constant in |u|^2_{L2(Omega)} <= C eta(u)^2, i.e. 1 / lambda1.
double poincare_constant(const AssembledSystem& sys);

} // namespace mixnl
