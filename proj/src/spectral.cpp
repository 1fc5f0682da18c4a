#include "mixnl/spectral.hpp"

#include "mixnl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace mixnl {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Without constrained DOFs and without the far-field tail the energy form
// annihilates constants.
bool has_constant_kernel(const AssembledSystem& sys) {
    const auto& roles = sys.mesh->node_role;
    const bool any_constrained = std::any_of(roles.begin(), roles.end(), is_constrained);
    return !any_constrained && !sys.meta.tail_included;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Reduction {
    std::vector<Index> omega;
    std::vector<Index> ext;
    MatrixXd schur;    // A_oo - A_oe A_ee^{-1} A_eo
    MatrixXd mass;     // M_oo
    MatrixXd coupling; // A_ee^{-1} A_eo
};

Reduction reduce(const MatrixXd& a, const MatrixXd& m, const AssembledSystem& sys) {
    Reduction r;
    r.omega = sys.omega_dofs();
    r.ext = sys.exterior_dofs();
    r.mass = m(r.omega, r.omega);
    if (r.ext.empty()) {
        r.schur = a(r.omega, r.omega);
        r.coupling.resize(0, static_cast<Index>(r.omega.size()));
        return r;
    }
    const MatrixXd a_ee = a(r.ext, r.ext);
    Eigen::LLT<MatrixXd> llt(a_ee);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
        throw SingularBlockError("exterior block of the energy form is numerically singular; "
                                 "the Neumann set is decoupled from Omega");
    }
    r.coupling = llt.solve(a(r.ext, r.omega));
    r.schur = a(r.omega, r.omega) - a(r.omega, r.ext) * r.coupling;
    r.schur = 0.5 * (r.schur + r.schur.transpose()).eval();
    return r;
}

EigenPair finish_pair(const Reduction& red, const MatrixXd& a, const MatrixXd& m, double lambda,
                      const VectorXd& omega_part) {
    const Index n = a.rows();
    VectorXd u = VectorXd::Zero(n);
    u(red.omega) = omega_part;
    if (!red.ext.empty()) {
        u(red.ext) = -red.coupling * omega_part;
    }
    const double norm2 = u.dot(m * u);
    u /= std::sqrt(norm2);
    if (VectorXd::Ones(n).dot(m * u) < 0.0) {
        u = -u;
    }
    EigenPair pair;
    pair.lambda = lambda;
    const VectorXd au = a * u;
    const double denom = std::max(au.norm(), 1e-300);
    pair.residual = (au - lambda * (m * u)).norm() / denom;
    if (au.norm() < 1e-8 * a.norm() * u.norm()) {
        pair.residual = (au - lambda * (m * u)).norm() / (a.norm() * u.norm());
    }
    pair.vector = std::move(u);
    return pair;
}

// Ritz pairs of the reduced pencil by dense generalized eigensolve.
std::vector<std::pair<double, VectorXd>> dense_reduced(const Reduction& red, const VectorXd* deflate,
                                                       int count) {
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(red.schur, red.mass);
    if (ges.info() != Eigen::Success) {
        throw SolverError("dense generalized eigensolver failed");
    }
    const auto& vals = ges.eigenvalues();
    const auto& vecs = ges.eigenvectors();
    Index skip = -1;
    if (deflate != nullptr) {
        double best = -1.0;
        const VectorXd mv = red.mass * *deflate;
        for (Index k = 0; k < std::min<Index>(2, vals.size()); ++k) {
            const double c = std::abs(vecs.col(k).dot(mv));
            if (c > best) {
                best = c;
                skip = k;
            }
        }
    }
    std::vector<std::pair<double, VectorXd>> out;
    for (Index k = 0; k < vals.size() && static_cast<int>(out.size()) < count; ++k) {
        if (k != skip) {
            out.emplace_back(vals(k), vecs.col(k));
        }
    }
    return out;
}

std::vector<std::pair<double, VectorXd>> lanczos_reduced(const Reduction& red, const VectorXd* deflate,
                                                         int count, double tol, int max_krylov,
                                                         SolverDiagnostics& diag) {
    const MatrixXd& s = red.schur;
    const MatrixXd& m = red.mass;
    const Index n = s.rows();
    const double s_norm = s.norm();
    const double m_norm = m.norm();

    double sigma = 0.0;
    if (deflate != nullptr) {
        sigma = -1e-3 * s.diagonal().mean() / m.diagonal().mean();
    }
    diag.shift = sigma;
    Eigen::LLT<MatrixXd> llt(s - sigma * m);
    if (llt.info() != Eigen::Success) {
        throw SolverError("shifted operator is not positive definite");
    }
    VectorXd mv;
    if (deflate != nullptr) {
        mv = m * *deflate;
    }
    auto project = [&](VectorXd& w) {
        if (deflate != nullptr) {
            w -= *deflate * mv.dot(w);
        }
    };

    const Index dim_limit = std::min<Index>(n - (deflate != nullptr ? 1 : 0), max_krylov);
    Index steps = std::min<Index>(dim_limit, std::max(2 * count + 20, 40));
    std::mt19937_64 rng(0x5eed);
    VectorXd start(n);
    for (Index i = 0; i < n; ++i) {
        start(i) = uniform01(rng) - 0.5;
    }

    while (true) {
        MatrixXd q(n, steps + 1);
        MatrixXd mq(n, steps + 1);
        std::vector<double> alpha;
        std::vector<double> beta;
        VectorXd v = start;
        project(v);
        v /= std::sqrt(v.dot(m * v));
        q.col(0) = v;
        mq.col(0) = m * v;
        Index k = 0;
        for (Index j = 0; j < steps; ++j) {
            VectorXd w = llt.solve(mq.col(j));
            project(w);
            const double a = mq.col(j).dot(w);
            alpha.push_back(a);
            for (int pass = 0; pass < 2; ++pass) {
                for (Index i = 0; i <= j; ++i) {
                    w -= q.col(i) * mq.col(i).dot(w);
                }
            }
            k = j + 1;
            const VectorXd mw = m * w;
            const double b = std::sqrt(std::max(w.dot(mw), 0.0));
            if (b <= 1e-14 * std::abs(a) || j + 1 == steps) {
                break;
            }
            beta.push_back(b);
            q.col(j + 1) = w / b;
            mq.col(j + 1) = mw / b;
        }
        diag.iterations = static_cast<int>(k);

        MatrixXd t = MatrixXd::Zero(k, k);
        for (Index i = 0; i < k; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < k) {
                t(i, i + 1) = beta[i];
                t(i + 1, i) = beta[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
        std::vector<std::pair<double, VectorXd>> out;
        bool converged = true;
        const int available = static_cast<int>(std::min<Index>(k, count));
        for (int r = 0; r < available; ++r) {
            const Index col = k - 1 - r; // largest theta first
            const double theta = es.eigenvalues()(col);
            const double lambda = sigma + 1.0 / theta;
            VectorXd x = q.leftCols(k) * es.eigenvectors().col(col);
            const VectorXd sx = s * x;
            // normwise backward error; |Sx| itself can sit at rounding level when lambda is small
            const double res =
                (sx - lambda * (m * x)).norm() / ((s_norm + std::abs(lambda) * m_norm) * x.norm());
            if (!(res <= tol)) {
                converged = false;
            }
            out.emplace_back(lambda, std::move(x));
        }
        if (converged && available == count) {
            return out;
        }
        if (steps >= dim_limit) {
            if (available == count && converged) {
                return out;
            }
            throw SolverError("shift-invert Lanczos did not converge within " + std::to_string(steps) +
                              " Krylov vectors");
        }
        steps = std::min<Index>(dim_limit, 2 * steps);
    }
}

} // namespace

const MatrixXd& mass_matrix(const AssembledSystem& sys, MassKind kind, MatrixXd& storage) {
    if (kind == MassKind::Consistent) {
        return sys.mass;
    }
    storage = sys.lumped_mass.asDiagonal();
    return storage;
}

Spectrum solve_smallest(const AssembledSystem& sys, int count, const SolveOptions& opts) {
    if (count < 1) {
        throw SolverError("eigenpair count must be at least 1");
    }
    MatrixXd storage;
    const MatrixXd& m = mass_matrix(sys, opts.mass, storage);
    const MatrixXd a = sys.stiffness();
    const Reduction red = reduce(a, m, sys);
    const Index n_omega = static_cast<Index>(red.omega.size());
    if (count > n_omega) {
        throw SolverError("requested more eigenpairs than Omega DOFs");
    }

    Spectrum sp;
    sp.requested = count;
    const bool deflate = has_constant_kernel(sys);
    VectorXd constant;
    if (deflate) {
        constant = VectorXd::Ones(n_omega);
        constant /= std::sqrt(constant.dot(red.mass * constant));
        sp.diagnostics.deflated_constant = true;
        const VectorXd full = VectorXd::Ones(a.rows());
        const double rq = full.dot(a * full) / full.dot(m * full);
        sp.pairs.push_back(finish_pair(red, a, m, rq, constant));
    }
    const int remaining = count - static_cast<int>(sp.pairs.size());
    if (remaining > 0) {
        std::vector<std::pair<double, VectorXd>> ritz;
        if (n_omega < opts.dense_limit) {
            sp.diagnostics.method = "dense";
            ritz = dense_reduced(red, deflate ? &constant : nullptr, remaining);
        } else {
            sp.diagnostics.method = "lanczos";
            ritz = lanczos_reduced(red, deflate ? &constant : nullptr, remaining, opts.tol,
                                   opts.max_krylov, sp.diagnostics);
        }
        for (auto& [lambda, x] : ritz) {
            sp.pairs.push_back(finish_pair(red, a, m, lambda, x));
        }
    } else {
        sp.diagnostics.method = "deflation";
    }
    std::stable_sort(sp.pairs.begin(), sp.pairs.end(),
                     [](const EigenPair& p, const EigenPair& q) { return p.lambda < q.lambda; });
    return sp;
}

Spectrum solve_dense_full_pencil(const AssembledSystem& sys, int count, double sigma, MassKind kind) {
    MatrixXd storage;
    const MatrixXd& m = mass_matrix(sys, kind, storage);
    const MatrixXd a = sys.stiffness();
    const MatrixXd shifted = a + sigma * m;
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(m, shifted);
    if (ges.info() != Eigen::Success) {
        throw SolverError("dense full-pencil solve failed (is A + sigma M positive definite?)");
    }
    Spectrum sp;
    sp.requested = count;
    sp.diagnostics.method = "dense-full";
    sp.diagnostics.shift = sigma;
    const Index n = a.rows();
    for (int r = 0; r < count && r < n; ++r) {
        const Index col = n - 1 - r;
        const double mu = ges.eigenvalues()(col);
        if (!(mu > 0.0)) {
            break;
        }
        VectorXd u = ges.eigenvectors().col(col);
        u /= std::sqrt(u.dot(m * u));
        if (VectorXd::Ones(n).dot(m * u) < 0.0) {
            u = -u;
        }
        EigenPair pair;
        pair.lambda = 1.0 / mu - sigma;
        const VectorXd au = a * u;
        pair.residual = (au - pair.lambda * (m * u)).norm() / std::max(au.norm(), 1e-300);
        pair.vector = std::move(u);
        sp.pairs.push_back(std::move(pair));
    }
    return sp;
}

PrincipalReport check_principal(const Spectrum& sp, const Mesh1D& mesh, std::size_t pair) {
    PrincipalReport rep;
    const VectorXd& u = sp.pairs.at(pair).vector;
    Index arg = 0;
    rep.min_value = u.minCoeff(&arg);
    rep.min_dof = static_cast<std::size_t>(arg);
    rep.min_x = mesh.nodes[mesh.dof_node[rep.min_dof]];
    const double scale = u.cwiseAbs().maxCoeff();
    int last_sign = 0;
    for (Index k = 0; k < u.size(); ++k) {
        if (std::abs(u(k)) <= 1e-12 * scale) {
            continue;
        }
        const int sign = u(k) > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) {
            ++rep.sign_changes;
        }
        last_sign = sign;
    }
    rep.pass = rep.min_value > 0.0;
    return rep;
}

SimplicityReport check_simplicity(const Spectrum& sp, double gap_tol) {
    if (sp.pairs.size() < 2) {
        throw SolverError("simplicity check needs two eigenpairs");
    }
    SimplicityReport rep;
    const double l1 = sp.pairs[0].lambda;
    const double l2 = sp.pairs[1].lambda;
    rep.gap = l2 - l1;
    rep.relative_gap = rep.gap / std::max(std::abs(l1), std::numeric_limits<double>::min());
    rep.pass = rep.gap > gap_tol * std::abs(l1) && rep.gap > 0.0;
    return rep;
}

OrthogonalityReport check_orthogonality(const Spectrum& sp, const AssembledSystem& sys, std::size_t i,
                                        std::size_t j, double tol, MassKind kind) {
    MatrixXd storage;
    const MatrixXd& m = mass_matrix(sys, kind, storage);
    const VectorXd& u = sp.pairs.at(i).vector;
    const VectorXd& v = sp.pairs.at(j).vector;
    OrthogonalityReport rep;
    rep.energy_product = u.dot(apply_operator(sys, v));
    rep.mass_product = u.dot(m * v);
    rep.pass = std::abs(rep.energy_product) <= tol && std::abs(rep.mass_product) <= tol;
    return rep;
}

} // namespace mixnl
