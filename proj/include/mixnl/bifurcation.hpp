#pragma once

#include "mixnl/assembly.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace mixnl {

enum class NonlinearityKind { AsymLinearDemo, Logistic };

std::string_view to_string(NonlinearityKind kind) noexcept;
NonlinearityKind parse_nonlinearity_kind(std::string_view text);

/// h(t) for t > 0, extended by zero on t <= 0. `scale` multiplies h, so the
/// slopes a (at zero) and theta (at infinity) scale with it.
struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::AsymLinearDemo;
    int p = 3;          // Logistic exponent
    double scale = 1.0;

    static Nonlinearity asym_linear_demo(double scale = 1.0);
    static Nonlinearity logistic(int p, double scale = 1.0);

    double h(double t) const;
    // Right derivative at t = 0, so dh(0) = a.
    double dh(double t) const;
    double a() const noexcept { return scale; }
    // Slope at infinity; 0 when h is not asymptotically linear (Logistic).
    double theta() const noexcept { return kind == NonlinearityKind::AsymLinearDemo ? scale : 0.0; }
};

/// A u - lambda * M_L h(u), with M_L the lumped Omega mass and h applied nodewise.
Eigen::VectorXd residual(const AssembledSystem& sys, const Nonlinearity& nl, double lambda,
                         const Eigen::VectorXd& u);

/// A - lambda * M_L diag(h'(u)).
Eigen::MatrixXd jacobian(const AssembledSystem& sys, const Nonlinearity& nl, double lambda,
                         const Eigen::VectorXd& u);

/// Central-difference Jacobian error max|J_fd - J| / max|J|, step 1e-6 (1 + |u|_inf).
double jacobian_fd_error(const AssembledSystem& sys, const Nonlinearity& nl, double lambda,
                         const Eigen::VectorXd& u);

struct NewtonResult {
    Eigen::VectorXd u;
    int iterations = 0;
    double residual_norm = 0.0;
};

/// Newton at fixed lambda until |F(u)| <= tol (1 + |A u|).
/// Throws NoConvergence or SingularJacobian.
NewtonResult newton_solve(const AssembledSystem& sys, const Nonlinearity& nl, double lambda,
                          const Eigen::VectorXd& u0, double tol = 1e-10, int max_iter = 50);

struct BranchPoint {
    double lambda = 0.0;
    Eigen::VectorXd u;
    double linf_norm = 0.0;
    double l2_norm = 0.0; // lumped L2(Omega) norm
    double arclength = 0.0;
    int newton_iters = 0;
};

struct Branch {
    std::vector<BranchPoint> points; // nontrivial points only
    double lambda0 = 0.0;
    double lambda_inf = std::numeric_limits<double>::infinity();
    double lambda1 = 0.0; // principal eigenvalue of the lumped pencil
    Eigen::VectorXd phi1; // its eigenvector, sup norm 1
    // u-component of the first secant step and its cosine with phi1.
    Eigen::VectorXd initial_tangent;
    double tangent_cosine = 0.0;
    int direction = 0; // sign of the initial lambda motion
    double max_step = 0.0;
    std::string termination;
    bool inverted = false;
};

struct FromZero {};
struct FromPoint {
    double lambda = 0.0;
    Eigen::VectorXd u;
    int direction = 1; // +1: start towards increasing lambda
};

struct ContinuationOptions {
    double epsilon = 1e-3;           // first point amplitude, in units of phi1
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-12;
    double growth = 1.3;
    int fast_iters = 4;              // grow the step when Newton needs at most this many
    double norm_cap_factor = 1e3;    // stop once |u|_inf exceeds this times the first norm
    double lambda_cap_factor = 10.0; // stop once lambda leaves [0, factor * lambda1]
    int max_points = 5000;
    int max_newton = 12;
    double tol = 1e-10;
};

/// Pseudo-arclength continuation with secant predictor and bordered Newton
/// corrector. The arclength metric is (dlambda / lambda1)^2 + du^T M_L du / |Omega|.
Branch continue_branch(const AssembledSystem& sys, const Nonlinearity& nl, const FromZero& start,
                       const ContinuationOptions& opts = {});
Branch continue_branch(const AssembledSystem& sys, const Nonlinearity& nl, const FromPoint& start,
                       const ContinuationOptions& opts = {});

/// v = u / |u|_inf^2 pointwise along the branch. Throws ZeroNorm on a trivial point.
Branch invert_branch(const Branch& b);

struct BifurcationPointReport {
    double lambda0 = 0.0;  // lambda1 / a
    double crossing = 0.0; // where A - lambda a M_L loses definiteness (bisection)
    double discrepancy = 0.0;
};

BifurcationPointReport detect_bifurcation_point(const AssembledSystem& sys, const Nonlinearity& nl);

} // namespace mixnl
