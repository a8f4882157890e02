#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "inflow/cost.hpp"
#include "inflow/navier_stokes.hpp"

namespace inflow {

/// U = { g : ||g||_{H^1_0(inlet)} <= rho }
struct AdmissibleSet {
  double rho = 1.0;

  void check() const;
  bool contains(const ControlProfile& g, double tol = 1e-12) const;
};

double control_norm(const ControlProfile& g);

/// Radial projection onto the ball in the H^1_0(inlet) norm, which is the
/// metric projection for that norm.
ControlProfile project_to_ball(const ControlProfile& g, const AdmissibleSet& set);

/// Largest sweep amplitude whose empirical contraction constant stays at or
/// below `threshold`, converted to a radius ||amplitude * shape|| * safety.
/// Returns nullopt when no amplitude qualifies.
std::optional<double> suggest_radius(const NavierStokesSolver& solver, const ControlProfile& shape,
                                     const BodyForce& f, const std::vector<double>& amplitudes,
                                     double threshold = 0.8, double safety = 0.9);

enum class StateModel { NavierStokes, Stokes };

/// The reduced functional j(g) = J(u(g), g) where u(g) solves the state
/// equation. The control vector is ControlProfile::interior(): interior
/// inlet values of g_x followed by those of g_y.
class ReducedProblem {
 public:
  ReducedProblem(std::shared_ptr<const NavierStokesSolver> solver, BodyForce f, CostFunctional cost,
                 PicardOptions picard = {}, StateModel model = StateModel::NavierStokes);

  struct Evaluation {
    CostValue cost;
    FlowField state;
    PicardReport report;  // empty for the Stokes model
  };

  const CostFunctional& cost() const { return cost_; }
  const NavierStokesSolver& solver() const { return *solver_; }
  const BodyForce& force() const { return f_; }
  const PicardOptions& picard() const { return picard_; }
  StateModel model() const { return model_; }
  const FESpace& space() const { return solver_->space(); }

  /// Solves the state equation; propagates DivergenceError.
  FlowField state(const ControlProfile& g, const std::optional<FlowField>& warm = std::nullopt) const;
  Evaluation evaluate(const ControlProfile& g, const std::optional<FlowField>& warm = std::nullopt) const;
  double reduced_cost(const ControlProfile& g) const { return evaluate(g).cost.J; }

  struct FdGradient {
    Eigen::VectorXd gradient;
    std::vector<std::size_t> flagged;  // entries whose probes diverged (left NaN)
  };
  /// Central differences (j(g + d e_i) - j(g - d e_i)) / 2d per control dof.
  /// Probes are split over `workers` threads.
  FdGradient gradient_fd(const ControlProfile& g, double step, unsigned workers = 1) const;

  /// Discrete adjoint gradient at a converged state. Solves
  /// F_x^T lambda = dJ/dx with the Jacobian of the discrete state equation
  /// (Oseen linearization for Navier-Stokes) and adds the inlet rows of
  /// lambda to the explicit control derivative. Throws SolverError when the
  /// adjoint factorization fails.
  Eigen::VectorXd gradient_adjoint(const ControlProfile& g, const FlowField& state) const;
  Eigen::VectorXd gradient_adjoint(const ControlProfile& g) const;

 private:
  std::shared_ptr<const NavierStokesSolver> solver_;
  BodyForce f_;
  CostFunctional cost_;
  PicardOptions picard_;
  StateModel model_;
};

double relative_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& reference);

/// Inner product of the discrete H^1_0(inlet) norm on control vectors:
/// the interior block of (mass + stiffness), once per component.
class ControlMetric {
 public:
  explicit ControlMetric(const FESpace& space);
  double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  double norm(const Eigen::VectorXd& a) const;
  /// Riesz representative: G^{-1} v.
  Eigen::VectorXd riesz(const Eigen::VectorXd& v) const;

 private:
  Eigen::MatrixXd block_;
  Eigen::LDLT<Eigen::MatrixXd> factor_;
};

enum class GradientKind { Adjoint, FiniteDifference };

struct AssimilationOptions {
  int max_iter = 100;
  double gtol = 1e-6;           // projected-gradient H^1_0 norm
  double armijo_sigma = 1e-4;
  int max_halvings = 30;
  double initial_step = 1.0;
  bool bb_step = true;          // Barzilai-Borwein trial step after the first iteration
  GradientKind gradient = GradientKind::Adjoint;
  double fd_step = 1e-5;
};

struct AssimilationIteration {
  int k = 0;
  CostValue cost;
  double grad_norm = 0.0;       // projected gradient, H^1_0 norm
  double step = 0.0;            // accepted step length (0 for the initial row)
  bool projected = false;       // accepted iterate was pulled back onto the ball
  int trials = 0;               // line-search trials
  int picard_iterations = 0;
  double control_norm = 0.0;
};

struct AssimilationReport {
  std::vector<AssimilationIteration> history;
  ControlProfile final_g;
  FlowField final_state;
  bool converged = false;
  std::string stop_reason;
  double initial_J = 0.0;
  std::optional<double> recovery_error;  // relative H^1_0 error against the truth, if known
};

class StagnationError : public Error {
 public:
  StagnationError(const std::string& what, AssimilationReport report)
      : Error(what), report_(std::move(report)) {}
  const AssimilationReport& report() const { return report_; }

 private:
  AssimilationReport report_;
};

/// Projected gradient descent with Armijo backtracking on the reduced
/// functional. Directions are Sobolev gradients (Riesz representatives in
/// the H^1_0(inlet) metric); a trial step that makes the state diverge counts
/// as a failed trial. Throws ParameterError when g0 is outside U and
/// StagnationError after max_halvings failed trials.
AssimilationReport assimilate(const ReducedProblem& problem, const AdmissibleSet& set, const ControlProfile& g0,
                              const AssimilationOptions& options = {},
                              const std::optional<ControlProfile>& truth = std::nullopt);

}  // namespace inflow
