#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "inflow/assembly.hpp"
#include "inflow/body_force.hpp"
#include "inflow/fem_space.hpp"

namespace inflow {

/// Fill-reducing ordering used by the sparse LU factorization.
enum class Ordering { Colamd, Amd };

/// Solution operator S(g, h) of the Stokes problem with wall no-slip, inlet
/// data g and a natural (do-nothing) outlet. The constrained saddle matrix
/// does not depend on g or h, so it is factorized once at construction and
/// every solve is a pair of triangular sweeps. Solves are const and may run
/// concurrently.
class StokesSolver {
 public:
  StokesSolver(std::shared_ptr<const FESpace> space, double nu, Ordering ordering = Ordering::Colamd);
  ~StokesSolver();
  StokesSolver(const StokesSolver&) = delete;
  StokesSolver& operator=(const StokesSolver&) = delete;

  const FESpace& space() const { return *space_; }
  const std::shared_ptr<const FESpace>& space_ptr() const { return space_; }
  double viscosity() const { return nu_; }
  const SaddleSystem& system() const { return system_; }
  /// Unconstrained saddle matrix [[A, B^T], [B, 0]].
  const SparseMatrix& full_matrix() const { return full_; }

  struct Solution {
    FlowField field;
    double relative_residual = 0.0;  // of the eliminated linear system
  };

  Solution solve_detailed(const ControlProfile& g, const Eigen::VectorXd& load) const;
  FlowField solve(const ControlProfile& g, const Eigen::VectorXd& load) const;
  FlowField solve(const ControlProfile& g, const BodyForce& h) const;
  /// Solve with an arbitrary lifting (any velocity vector carrying the
  /// Dirichlet values); the result is independent of the interior part.
  FlowField solve_lifted(const Eigen::VectorXd& lift, const Eigen::VectorXd& load) const;

  const std::vector<double>& velocity_basis_norms() const { return velocity_norms_; }
  const std::vector<double>& pressure_basis_norms() const { return pressure_norms_; }

 private:
  struct Factorization;
  std::shared_ptr<const FESpace> space_;
  double nu_;
  SaddleSystem system_;
  SparseMatrix full_;
  std::unique_ptr<Factorization> lu_;
  std::vector<double> velocity_norms_;
  std::vector<double> pressure_norms_;
};

FlowField solve_stokes(std::shared_ptr<const FESpace> space, double nu, const ControlProfile& g,
                       const BodyForce& h);

/// Weak residual of a field: the largest of
///   max_i |nu (grad u, grad phi_i) - (p, div phi_i) + c(u, phi_i) - load_i| / ||phi_i||_{H^1}
/// over velocity tests vanishing on the Dirichlet boundary (outlet tests
/// included), max_k |(div u, q_k)| / ||q_k||, and the Dirichlet trace
/// mismatch max |u - g| on constrained dofs. c is the convective form when
/// `convection` is set, zero otherwise.
double weak_residual(const StokesSolver& solver, const FlowField& field, const ControlProfile& g,
                     const Eigen::VectorXd& load, bool convection);

double stokes_residual(const StokesSolver& solver, const FlowField& field, const ControlProfile& g,
                       const BodyForce& h);

/// Fitted-constant check of an a-priori bound lhs <= c * rhs_scale (+ offset).
struct EstimateReport {
  double fitted_c = 0.0;
  double margin_factor = 1.0;  // held-out cases are tested against margin_factor * fitted_c
  bool degenerate = false;     // calibration half carried no information
  std::size_t calibration_count = 0;
  std::size_t holdout_count = 0;
  std::size_t violations = 0;
  std::vector<double> holdout_margins;  // bound / lhs on held-out cases (>= 1 means satisfied)
  std::vector<std::size_t> excluded;    // case indices left out (e.g. Picard divergence)
};

struct StokesCase {
  ControlProfile g;
  BodyForce h;
};

/// Checks ||S(g,h)||_{H^1}^2 <= c (||g||_{H^1_0}^2 + ||h||_{L^{3/2}}^2): c is
/// fitted as the largest ratio over the even-indexed cases and tested on the
/// odd-indexed ones. Needs at least 10 cases.
EstimateReport verify_stokes_estimate(const StokesSolver& solver, const std::vector<StokesCase>& cases,
                                      double margin_factor = 2.0);

}  // namespace inflow
