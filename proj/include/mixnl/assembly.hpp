#pragma once

#include "mixnl/domain.hpp"
#include "mixnl/frackernel.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace mixnl {

struct SystemMeta {
    double s = 0.0;
    double c_ns = 0.0;
    double nonlocal_weight = 1.0;
    bool tail_included = true;
};

/// Discrete energy and mass over the free DOFs of a mesh.
///
/// u^T (a_local + a_nonlocal) u is the squared energy norm (gradient term
/// on Omega plus the Gagliardo form over the interaction set), u^T mass u
/// is the squared L2(Omega) norm. Rows of DOFs whose hat function does not
/// meet Omega are zero in `mass`.
struct AssembledSystem {
    Eigen::MatrixXd a_local;
    Eigen::MatrixXd a_nonlocal;
    Eigen::MatrixXd mass;
    Eigen::VectorXd lumped_mass; // integral of each hat function over Omega
    SystemMeta meta;
    std::shared_ptr<const Mesh1D> mesh;

    Eigen::Index size() const noexcept { return mass.rows(); }
    Eigen::MatrixXd stiffness() const { return a_local + a_nonlocal; }

    // Free DOFs whose hat function carries Omega mass, and the rest.
    std::vector<Eigen::Index> omega_dofs() const;
    std::vector<Eigen::Index> exterior_dofs() const;
};

AssembledSystem assemble(std::shared_ptr<const Mesh1D> mesh, const FracKernel& kernel);

/// Energy over L2(Omega) mass. Throws ZeroMassError when the vector carries
/// no Omega mass.
double rayleigh_quotient(const AssembledSystem& sys, const Eigen::VectorXd& u);

Eigen::VectorXd apply_operator(const AssembledSystem& sys, const Eigen::VectorXd& u);

// Coordinate-format dump (row col value, one entry per line, 1-based indices).
void write_matrix_coo(const Eigen::MatrixXd& m, const std::string& path);

} // namespace mixnl
