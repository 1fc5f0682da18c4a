#include "mixnl/assembly.hpp"

#include "mixnl/errors.hpp"
#include "mixnl/quadrature.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace mixnl {

namespace {

Panel panel_of(const Mesh1D& mesh, std::size_t e) {
    return Panel{mesh.nodes[e], mesh.nodes[e + 1], e, e + 1};
}

void scatter(Eigen::MatrixXd& target, const Mesh1D& mesh, const PanelBlock& block, double factor) {
    for (std::size_t a = 0; a < block.count; ++a) {
        const int ra = mesh.free_dof[block.node[a]];
        if (ra < 0) {
            continue;
        }
        for (std::size_t b = 0; b < block.count; ++b) {
            const int rb = mesh.free_dof[block.node[b]];
            if (rb < 0) {
                continue;
            }
            target(ra, rb) += factor * block.value[a][b];
        }
    }
}

bool touches_omega(const Mesh1D& mesh, std::size_t node) {
    const NodeRole r = mesh.node_role[node];
    return r == NodeRole::OmegaInterior || r == NodeRole::OmegaBoundaryNeumann || r == NodeRole::OmegaBoundaryDirichlet;
}

// For y in an exterior panel away from the closure of Omega, the F x F part
// of the block is int int phi_a(y) phi_b(y) K: a weighted mass in y. Row-sum
// lumping it turns the Neumann-node equations into positive averages of the
// Omega values, the discrete form of the pointwise Neumann identity.
void lump_exterior(PanelBlock& block) {
    const double d2 = block.value[2][2] + block.value[2][3];
    const double d3 = block.value[3][3] + block.value[3][2];
    block.value[2][2] = d2;
    block.value[3][3] = d3;
    block.value[2][3] = 0.0;
    block.value[3][2] = 0.0;
}

} // namespace

std::vector<Eigen::Index> AssembledSystem::omega_dofs() const {
    std::vector<Eigen::Index> out;
    for (std::size_t k = 0; k < mesh->dof_node.size(); ++k) {
        if (is_omega_supported(mesh->node_role[mesh->dof_node[k]])) {
            out.push_back(static_cast<Eigen::Index>(k));
        }
    }
    return out;
}

std::vector<Eigen::Index> AssembledSystem::exterior_dofs() const {
    std::vector<Eigen::Index> out;
    for (std::size_t k = 0; k < mesh->dof_node.size(); ++k) {
        if (!is_omega_supported(mesh->node_role[mesh->dof_node[k]])) {
            out.push_back(static_cast<Eigen::Index>(k));
        }
    }
    return out;
}

AssembledSystem assemble(std::shared_ptr<const Mesh1D> mesh_ptr, const FracKernel& kernel) {
    const Mesh1D& mesh = *mesh_ptr;
    if (std::abs(kernel.s - mesh.config.fractional_order) > 1e-15) {
        throw AssemblyError("kernel order does not match the mesh configuration");
    }
    const auto n = static_cast<Eigen::Index>(free_dof_count(mesh));
    AssembledSystem sys;
    sys.a_local = Eigen::MatrixXd::Zero(n, n);
    sys.a_nonlocal = Eigen::MatrixXd::Zero(n, n);
    sys.mass = Eigen::MatrixXd::Zero(n, n);
    sys.lumped_mass = Eigen::VectorXd::Zero(n);
    sys.meta = SystemMeta{kernel.s, kernel.c_ns, kernel.nonlocal_weight, !mesh.config.far_field_dropped()};
    sys.mesh = mesh_ptr;

    const double R = mesh.config.truncation_radius;
    const auto& tail_rule = quad::gauss_legendre(6);

    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        if (mesh.element_region[e] != Region::Omega) {
            continue;
        }
        const double h = mesh.element_length(e);
        const int dofs[2] = {mesh.free_dof[e], mesh.free_dof[e + 1]};
        const double stiff[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
        const double mass[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};

        double tail[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        if (sys.meta.tail_included) {
            for (std::size_t q = 0; q < tail_rule.size(); ++q) {
                const double t = tail_rule.nodes[q];
                const double x = mesh.nodes[e] + h * t;
                const double phi[2] = {1.0 - t, t};
                const double w = 2.0 * tail_rule.weights[q] * h * tail_weight(kernel, x, R, true);
                for (int a = 0; a < 2; ++a) {
                    for (int b = 0; b < 2; ++b) {
                        tail[a][b] += w * phi[a] * phi[b];
                    }
                }
            }
        }

        for (int a = 0; a < 2; ++a) {
            if (dofs[a] < 0) {
                continue;
            }
            sys.lumped_mass(dofs[a]) += 0.5 * h;
            for (int b = 0; b < 2; ++b) {
                if (dofs[b] < 0) {
                    continue;
                }
                sys.a_local(dofs[a], dofs[b]) += stiff[a][b];
                sys.mass(dofs[a], dofs[b]) += mass[a][b];
                sys.a_nonlocal(dofs[a], dofs[b]) += tail[a][b];
            }
        }

        // Omega x Omega is visited in both orders by the loop itself; pairs
        // with one panel outside Omega are visited once and doubled.
        const Panel pe = panel_of(mesh, e);
        for (std::size_t f = 0; f < mesh.element_count(); ++f) {
            const double factor = mesh.element_region[f] == Region::Omega ? 1.0 : 2.0;
            const Panel pf = panel_of(mesh, f);
            const bool exterior = !touches_omega(mesh, f) && !touches_omega(mesh, f + 1);
            try {
                PanelBlock block = panel_interaction(kernel, pe, pf);
                if (exterior) {
                    lump_exterior(block);
                }
                scatter(sys.a_nonlocal, mesh, block, factor);
            } catch (const QuadratureError& err) {
                throw AssemblyError("panel pair (" + std::to_string(e) + ", " + std::to_string(f) +
                                    "): " + err.what());
            }
        }
    }

    sys.a_nonlocal *= kernel.nonlocal_weight;
    // exact symmetry; the quadrature is symmetric only up to rounding
    sys.a_nonlocal = 0.5 * (sys.a_nonlocal + sys.a_nonlocal.transpose()).eval();
    return sys;
}

double rayleigh_quotient(const AssembledSystem& sys, const Eigen::VectorXd& u) {
    const double m = u.dot(sys.mass * u);
    const double scale = sys.mass.diagonal().cwiseAbs().maxCoeff() * u.squaredNorm();
    if (!(m > 1e-14 * scale)) {
        throw ZeroMassError("vector carries no L2(Omega) mass");
    }
    return u.dot(sys.a_local * u + sys.a_nonlocal * u) / m;
}

Eigen::VectorXd apply_operator(const AssembledSystem& sys, const Eigen::VectorXd& u) {
    return sys.a_local * u + sys.a_nonlocal * u;
}

void write_matrix_coo(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) {
                out << (i + 1) << ' ' << (j + 1) << ' ' << m(i, j) << '\n';
            }
        }
    }
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

} // namespace mixnl
