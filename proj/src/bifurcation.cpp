#include "mixnl/bifurcation.hpp"

#include "mixnl/errors.hpp"
#include "mixnl/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <optional>

namespace mixnl {

namespace {

constexpr double kSingularRcond = 1e-14;

Eigen::VectorXd apply_h(const Nonlinearity& nl, const Eigen::VectorXd& u) {
    return u.unaryExpr([&](double t) { return nl.h(t); });
}

Eigen::VectorXd apply_dh(const Nonlinearity& nl, const Eigen::VectorXd& u) {
    return u.unaryExpr([&](double t) { return nl.dh(t); });
}

// A point (lambda, u) of the continuation with the scaled inner product
// (dlambda / lambda_ref)^2 + du^T W du.
struct State {
    double lambda = 0.0;
    Eigen::VectorXd u;
};

class Tracer {
public:
    Tracer(const AssembledSystem& sys, const Nonlinearity& nl, double lambda_ref, const ContinuationOptions& opts)
        : sys_(sys), nl_(nl), a_(sys.stiffness()), opts_(opts), lambda_ref_(lambda_ref) {
        weight_ = sys.lumped_mass / sys.lumped_mass.sum();
    }

    double dot(const State& p, const State& q) const {
        return p.lambda * q.lambda / (lambda_ref_ * lambda_ref_) + p.u.dot(weight_.cwiseProduct(q.u));
    }
    double norm(const State& p) const { return std::sqrt(dot(p, p)); }

    static State diff(const State& p, const State& q) { return {p.lambda - q.lambda, p.u - q.u}; }

    // Newton on F(lambda, u) = 0 together with the linear constraint
    // c_lambda * lambda + c_u^T u = target. Returns the iteration count, or
    // nothing if the corrector fails.
    std::optional<int> correct(State& x, double c_lambda, const Eigen::VectorXd& c_u, double target) const {
        const Eigen::Index n = sys_.size();
        for (int it = 0; it <= opts_.max_newton; ++it) {
            const Eigen::VectorXd au = a_ * x.u;
            const Eigen::VectorXd mh = sys_.lumped_mass.cwiseProduct(apply_h(nl_, x.u));
            const Eigen::VectorXd f = au - x.lambda * mh;
            const double g = c_lambda * x.lambda + c_u.dot(x.u) - target;
            if (!f.allFinite() || !std::isfinite(g)) {
                return std::nullopt;
            }
            if (it > 0 && f.norm() <= opts_.tol * (1.0 + au.norm())) {
                return it;
            }
            if (it == opts_.max_newton) {
                break;
            }
            Eigen::MatrixXd bordered(n + 1, n + 1);
            bordered.topLeftCorner(n, n) = a_;
            bordered.topLeftCorner(n, n).diagonal() -=
                x.lambda * sys_.lumped_mass.cwiseProduct(apply_dh(nl_, x.u));
            bordered.topRightCorner(n, 1) = -mh;
            bordered.bottomLeftCorner(1, n) = c_u.transpose();
            bordered(n, n) = c_lambda;
            Eigen::VectorXd rhs(n + 1);
            rhs << -f, -g;
            const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bordered);
            if (!(lu.rcond() > kSingularRcond)) {
                return std::nullopt;
            }
            const Eigen::VectorXd step = lu.solve(rhs);
            x.u += step.head(n);
            x.lambda += step(n);
        }
        return std::nullopt;
    }

    // Arclength constraint <t, x - base> = ds in the scaled product.
    std::optional<int> correct_arclength(State& x, const State& base, const State& t, double ds) const {
        const double c_lambda = t.lambda / (lambda_ref_ * lambda_ref_);
        const Eigen::VectorXd c_u = weight_.cwiseProduct(t.u);
        return correct(x, c_lambda, c_u, dot(t, base) + ds);
    }

    BranchPoint make_point(const State& x, double arclength, int iters) const {
        BranchPoint p;
        p.lambda = x.lambda;
        p.u = x.u;
        p.linf_norm = x.u.cwiseAbs().maxCoeff();
        p.l2_norm = std::sqrt(x.u.dot(sys_.lumped_mass.cwiseProduct(x.u)));
        p.arclength = arclength;
        p.newton_iters = iters;
        return p;
    }

    // Steps along the branch from `current`, with `previous` providing the
    // secant. Fills `b` until a cap is hit.
    void trace(Branch& b, State previous, State current, double ds, double lambda_cap, double norm_cap) const {
        double arclength = b.points.back().arclength;
        while (true) {
            if (static_cast<int>(b.points.size()) >= opts_.max_points) {
                b.termination = "max_points";
                return;
            }
            State t = diff(current, previous);
            const double tn = norm(t);
            t.lambda /= tn;
            t.u /= tn;

            State next{current.lambda + ds * t.lambda, current.u + ds * t.u};
            const auto iters = correct_arclength(next, current, t, ds);
            const State step = diff(next, current);
            const double step_len = iters ? norm(step) : 0.0;
            // reject corrections that turned sharply away from the predictor
            const bool accepted = iters && step_len > 0.0 && ds / step_len > 0.8;
            if (!accepted) {
                ds *= 0.5;
                if (ds < opts_.min_step) {
                    throw ContinuationStall("continuation step fell below " + std::to_string(opts_.min_step) +
                                            " at lambda = " + std::to_string(current.lambda));
                }
                continue;
            }

            arclength += step_len;
            b.points.push_back(make_point(next, arclength, *iters));
            previous = current;
            current = next;
            if (*iters <= opts_.fast_iters) {
                ds = std::min(ds * opts_.growth, opts_.max_step);
            }

            const auto& last = b.points.back();
            if (last.linf_norm > norm_cap) {
                b.termination = "norm_cap";
                return;
            }
            if (last.lambda < 0.0 || last.lambda > lambda_cap) {
                b.termination = "lambda_range";
                return;
            }
        }
    }

private:
    const AssembledSystem& sys_;
    const Nonlinearity& nl_;
    Eigen::MatrixXd a_;
    ContinuationOptions opts_;
    double lambda_ref_;
    Eigen::VectorXd weight_;
};

struct LumpedPrincipal {
    double lambda1;
    Eigen::VectorXd phi1; // sup norm 1, positive
};

LumpedPrincipal lumped_principal(const AssembledSystem& sys) {
    SolveOptions so;
    so.mass = MassKind::Lumped;
    const Spectrum sp = solve_smallest(sys, 1, so);
    const auto& pair = sp.pairs.front();
    Eigen::VectorXd phi = pair.vector / pair.vector.cwiseAbs().maxCoeff();
    if (phi.sum() < 0.0) {
        phi = -phi;
    }
    return {pair.lambda, phi};
}

void fill_anchors(Branch& b, const Nonlinearity& nl, const LumpedPrincipal& lp) {
    b.lambda1 = lp.lambda1;
    b.phi1 = lp.phi1;
    b.lambda0 = lp.lambda1 / nl.a();
    b.lambda_inf = nl.theta() > 0.0 ? lp.lambda1 / nl.theta() : std::numeric_limits<double>::infinity();
}

void record_tangent(Branch& b) {
    if (b.points.size() < 2) {
        return;
    }
    b.initial_tangent = b.points[1].u - b.points[0].u;
    const double denom = b.initial_tangent.norm() * b.phi1.norm();
    b.tangent_cosine = denom > 0.0 ? b.initial_tangent.dot(b.phi1) / denom : 0.0;
}

} // namespace

std::string_view to_string(NonlinearityKind kind) noexcept {
    switch (kind) {
    case NonlinearityKind::AsymLinearDemo: return "AsymLinearDemo";
    case NonlinearityKind::Logistic: return "Logistic";
    }
    return "?";
}

NonlinearityKind parse_nonlinearity_kind(std::string_view text) {
    if (text == "AsymLinearDemo") return NonlinearityKind::AsymLinearDemo;
    if (text == "Logistic") return NonlinearityKind::Logistic;
    throw ConfigError("unknown nonlinearity '" + std::string(text) + "'");
}

Nonlinearity Nonlinearity::asym_linear_demo(double scale) {
    if (!(scale > 0.0)) {
        throw ConfigError("nonlinearity scale must be positive");
    }
    return {NonlinearityKind::AsymLinearDemo, 3, scale};
}

Nonlinearity Nonlinearity::logistic(int p, double scale) {
    if (p < 2) {
        throw ConfigError("logistic exponent must be an integer > 1");
    }
    if (!(scale > 0.0)) {
        throw ConfigError("nonlinearity scale must be positive");
    }
    return {NonlinearityKind::Logistic, p, scale};
}

double Nonlinearity::h(double t) const {
    if (t <= 0.0) {
        return 0.0;
    }
    if (kind == NonlinearityKind::AsymLinearDemo) {
        return scale * (t + t * t * std::exp(-t));
    }
    return scale * (t - std::pow(t, p));
}

double Nonlinearity::dh(double t) const {
    if (t < 0.0) {
        return 0.0;
    }
    if (kind == NonlinearityKind::AsymLinearDemo) {
        return scale * (1.0 + (2.0 * t - t * t) * std::exp(-t));
    }
    return scale * (1.0 - p * std::pow(t, p - 1));
}

Eigen::VectorXd residual(const AssembledSystem& sys, const Nonlinearity& nl, double lambda,
                         const Eigen::VectorXd& u) {
    return apply_operator(sys, u) - lambda * sys.lumped_mass.cwiseProduct(apply_h(nl, u));
}

Eigen::MatrixXd jacobian(const AssembledSystem& sys, const Nonlinearity& nl, double lambda,
                         const Eigen::VectorXd& u) {
    Eigen::MatrixXd j = sys.stiffness();
    j.diagonal() -= lambda * sys.lumped_mass.cwiseProduct(apply_dh(nl, u));
    return j;
}

double jacobian_fd_error(const AssembledSystem& sys, const Nonlinearity& nl, double lambda,
                         const Eigen::VectorXd& u) {
    const Eigen::MatrixXd j = jacobian(sys, nl, lambda, u);
    const double delta = 1e-6 * (1.0 + u.cwiseAbs().maxCoeff());
    double worst = 0.0;
    Eigen::VectorXd up = u;
    Eigen::VectorXd um = u;
    for (Eigen::Index c = 0; c < u.size(); ++c) {
        up(c) += delta;
        um(c) -= delta;
        const Eigen::VectorXd col = (residual(sys, nl, lambda, up) - residual(sys, nl, lambda, um)) / (2.0 * delta);
        worst = std::max(worst, (col - j.col(c)).cwiseAbs().maxCoeff());
        up(c) = u(c);
        um(c) = u(c);
    }
    return worst / j.cwiseAbs().maxCoeff();
}

NewtonResult newton_solve(const AssembledSystem& sys, const Nonlinearity& nl, double lambda,
                          const Eigen::VectorXd& u0, double tol, int max_iter) {
    if (u0.size() != sys.size()) {
        throw SolverError("initial guess has the wrong size");
    }
    NewtonResult res;
    res.u = u0;
    for (int it = 0; it <= max_iter; ++it) {
        const Eigen::VectorXd au = apply_operator(sys, res.u);
        const Eigen::VectorXd f = au - lambda * sys.lumped_mass.cwiseProduct(apply_h(nl, res.u));
        res.residual_norm = f.norm();
        res.iterations = it;
        if (!std::isfinite(res.residual_norm)) {
            throw NoConvergence("Newton iterate is not finite at lambda = " + std::to_string(lambda));
        }
        if (res.residual_norm <= tol * (1.0 + au.norm())) {
            return res;
        }
        if (it == max_iter) {
            break;
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jacobian(sys, nl, lambda, res.u));
        if (!(lu.rcond() > kSingularRcond)) {
            throw SingularJacobian("Jacobian is singular at lambda = " + std::to_string(lambda));
        }
        res.u -= lu.solve(f);
    }
    throw NoConvergence("Newton did not converge in " + std::to_string(max_iter) + " iterations at lambda = " +
                        std::to_string(lambda));
}

Branch continue_branch(const AssembledSystem& sys, const Nonlinearity& nl, const FromZero&,
                       const ContinuationOptions& opts) {
    if (!(nl.a() > 0.0)) {
        throw ConfigError("bifurcation from zero needs a > 0");
    }
    const LumpedPrincipal lp = lumped_principal(sys);
    Branch b;
    fill_anchors(b, nl, lp);
    b.max_step = opts.max_step;
    const Tracer tracer(sys, nl, lp.lambda1, opts);

    // The sign of phi1^T M_L f(eps phi1), f(t) = h(t) - a t, decides whether
    // the branch leaves lambda0 to the left or to the right.
    const Eigen::VectorXd u_guess = opts.epsilon * lp.phi1;
    const Eigen::VectorXd f = apply_h(nl, u_guess) - nl.a() * u_guess;
    const double proj = lp.phi1.dot(sys.lumped_mass.cwiseProduct(f));
    b.direction = proj > 0.0 ? -1 : 1;

    // First point: amplitude fixed at eps along phi1.
    State first{b.lambda0 * (1.0 + b.direction * opts.epsilon), u_guess};
    const Eigen::VectorXd c_u = sys.lumped_mass.cwiseProduct(lp.phi1);
    const auto iters = tracer.correct(first, 0.0, c_u, c_u.dot(u_guess));
    if (!iters) {
        throw NoConvergence("no nontrivial solution near the bifurcation point");
    }
    b.points.push_back(tracer.make_point(first, 0.0, *iters));

    const State anchor{b.lambda0, Eigen::VectorXd::Zero(sys.size())};
    const double ds = tracer.norm(Tracer::diff(first, anchor));
    tracer.trace(b, anchor, first, std::min(ds, opts.max_step), opts.lambda_cap_factor * lp.lambda1,
                 opts.norm_cap_factor * b.points.front().linf_norm);
    record_tangent(b);
    return b;
}

Branch continue_branch(const AssembledSystem& sys, const Nonlinearity& nl, const FromPoint& start,
                       const ContinuationOptions& opts) {
    const LumpedPrincipal lp = lumped_principal(sys);
    Branch b;
    fill_anchors(b, nl, lp);
    b.max_step = opts.max_step;
    b.direction = start.direction >= 0 ? 1 : -1;
    const Tracer tracer(sys, nl, lp.lambda1, opts);

    const NewtonResult nr = newton_solve(sys, nl, start.lambda, start.u, opts.tol, opts.max_newton);
    const State first{start.lambda, nr.u};
    b.points.push_back(tracer.make_point(first, 0.0, nr.iterations));

    // Tangent (1, du/dlambda) with J du/dlambda = M_L h(u).
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jacobian(sys, nl, first.lambda, first.u));
    if (!(lu.rcond() > kSingularRcond)) {
        throw SingularJacobian("cannot start continuation at a singular point");
    }
    State t{1.0, lu.solve(sys.lumped_mass.cwiseProduct(apply_h(nl, first.u)))};
    const double tn = tracer.norm(t);
    const double ds = std::min(1e-2 * std::max(1.0, tracer.norm(first)), opts.max_step);
    const double scale = b.direction * ds / tn;
    const State virtual_prev{first.lambda - scale * t.lambda, first.u - scale * t.u};
    tracer.trace(b, virtual_prev, first, ds, opts.lambda_cap_factor * lp.lambda1,
                 opts.norm_cap_factor * std::max(b.points.front().linf_norm, 1e-300));
    record_tangent(b);
    return b;
}

Branch invert_branch(const Branch& b) {
    Branch out = b;
    out.inverted = !b.inverted;
    for (auto& p : out.points) {
        const double n = p.u.cwiseAbs().maxCoeff();
        if (!(n > 0.0)) {
            throw ZeroNorm("cannot invert a trivial branch point");
        }
        const double factor = 1.0 / (n * n);
        p.u *= factor;
        p.linf_norm = p.u.cwiseAbs().maxCoeff();
        p.l2_norm *= factor;
    }
    return out;
}

BifurcationPointReport detect_bifurcation_point(const AssembledSystem& sys, const Nonlinearity& nl) {
    if (!(nl.a() > 0.0)) {
        throw ConfigError("bifurcation from zero needs a > 0");
    }
    const LumpedPrincipal lp = lumped_principal(sys);
    BifurcationPointReport rep;
    rep.lambda0 = lp.lambda1 / nl.a();

    const Eigen::MatrixXd a = sys.stiffness();
    const Eigen::VectorXd m = nl.a() * sys.lumped_mass;
    auto definite = [&](double lambda) {
        Eigen::MatrixXd j = a;
        j.diagonal() -= lambda * m;
        return Eigen::LLT<Eigen::MatrixXd>(j).info() == Eigen::Success;
    };
    double lo = 0.5 * rep.lambda0;
    double hi = 1.5 * rep.lambda0;
    if (!definite(lo) || definite(hi)) {
        throw SolverError("Jacobian definiteness does not change around lambda0");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * rep.lambda0; ++it) {
        const double mid = 0.5 * (lo + hi);
        (definite(mid) ? lo : hi) = mid;
    }
    rep.crossing = 0.5 * (lo + hi);
    rep.discrepancy = std::abs(rep.crossing - rep.lambda0);
    return rep;
}

} // namespace mixnl
