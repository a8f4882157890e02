#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "inflow/body_force.hpp"
#include "inflow/fem_space.hpp"

namespace inflow {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Blocks of the discrete Stokes saddle-point problem
///   [ A  B^T ] [u]   [load]
///   [ B  0   ] [p] = [ 0  ]
/// with A_ij = nu (grad phi_i, grad phi_j) and B_kj = -(q_k, div phi_j).
/// apply_dirichlet() records the constrained velocity dofs and their values.
struct SaddleSystem {
  SparseMatrix A;
  SparseMatrix B;
  Eigen::VectorXd load;
  std::vector<std::size_t> constrained;  // sorted velocity dofs
  Eigen::VectorXd prescribed;            // full velocity vector: lifting values, zero elsewhere

  std::size_t velocity_size() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t pressure_size() const { return static_cast<std::size_t>(B.rows()); }
};

SaddleSystem assemble_stokes(const FESpace& space, double nu);

/// N(w)_ij = int ((w . grad) phi_j) . phi_i
SparseMatrix assemble_convection(const FESpace& space, const Eigen::VectorXd& w);
/// N'(w)_ij = int ((phi_j . grad) w) . phi_i, so that d/du [N(u) u] = N(u) + N'(u).
SparseMatrix assemble_convection_derivative(const FESpace& space, const Eigen::VectorXd& w);

/// Consistent load (f, phi_i).
Eigen::VectorXd assemble_load(const FESpace& space, const BodyForce& f);

/// Vector P2 mass matrix restricted to the listed elements (all when empty).
SparseMatrix assemble_mass(const FESpace& space, const std::vector<std::size_t>& elements = {});

/// Pins wall dofs to zero and inlet interior dofs to g; the outlet is left
/// natural.
void apply_dirichlet(SaddleSystem& system, const FESpace& space, const ControlProfile& g);

/// Nodal lifting of g: the velocity vector equal to g on the inlet chain and
/// zero elsewhere.
Eigen::VectorXd inlet_lifting(const FESpace& space, const ControlProfile& g);

/// Full (velocity + pressure) matrix [[A + extra, B^T], [B, 0]] with no
/// constraints applied.
SparseMatrix saddle_matrix(const SaddleSystem& system, const SparseMatrix* extra = nullptr);

/// Symmetric elimination: constrained rows and columns replaced by identity.
SparseMatrix eliminate_constraints(const SparseMatrix& full, const std::vector<std::size_t>& constrained);

/// Right-hand side of the eliminated system for the lifting `lift` (full
/// velocity vector) and momentum load. The unknown is the correction to the
/// lifting, so constrained entries are zero.
Eigen::VectorXd constrained_rhs(const SparseMatrix& full, const std::vector<std::size_t>& constrained,
                                const Eigen::VectorXd& lift, const Eigen::VectorXd& load);

/// H^1 norms of the scalar P2 basis functions and L^2 norms of the P1 basis,
/// used to normalize weak residuals.
std::vector<double> velocity_basis_h1_norms(const FESpace& space);
std::vector<double> pressure_basis_l2_norms(const FESpace& space);

}  // namespace inflow
