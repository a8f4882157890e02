#include "inflow/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "inflow/errors.hpp"
#include "inflow/norms.hpp"

namespace inflow {

struct StokesSolver::Factorization {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> colamd;
  Eigen::SparseLU<SparseMatrix, Eigen::AMDOrdering<int>> amd;
  Ordering ordering = Ordering::Colamd;
  SparseMatrix eliminated;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    return ordering == Ordering::Colamd ? Eigen::VectorXd(colamd.solve(rhs)) : Eigen::VectorXd(amd.solve(rhs));
  }
};

StokesSolver::StokesSolver(std::shared_ptr<const FESpace> space, double nu, Ordering ordering)
    : space_(std::move(space)), nu_(nu), lu_(std::make_unique<Factorization>()) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ParameterError("viscosity must be positive and finite");
  system_ = assemble_stokes(*space_, nu_);
  apply_dirichlet(system_, *space_, ControlProfile::zero(*space_));
  full_ = saddle_matrix(system_);
  lu_->ordering = ordering;
  lu_->eliminated = eliminate_constraints(full_, system_.constrained);

  const auto factor = [this](auto& lu) {
    lu.analyzePattern(lu_->eliminated);
    lu.factorize(lu_->eliminated);
    if (lu.info() != Eigen::Success) {
      throw SolverError("Stokes factorization failed (" + std::to_string(lu_->eliminated.rows()) +
                        " unknowns): " + lu.lastErrorMessage());
    }
  };
  if (ordering == Ordering::Colamd) {
    factor(lu_->colamd);
  } else {
    factor(lu_->amd);
  }
  velocity_norms_ = velocity_basis_h1_norms(*space_);
  pressure_norms_ = pressure_basis_l2_norms(*space_);
}

StokesSolver::~StokesSolver() = default;

StokesSolver::Solution StokesSolver::solve_detailed(const ControlProfile& g, const Eigen::VectorXd& load) const {
  const Eigen::VectorXd lift = inlet_lifting(*space_, g);
  if (static_cast<std::size_t>(load.size()) != space_->velocity_size()) {
    throw InvariantError("load vector does not match the space");
  }
  const Eigen::VectorXd rhs = constrained_rhs(full_, system_.constrained, lift, load);
  const Eigen::VectorXd x = lu_->solve(rhs);
  if (!x.allFinite()) throw SolverError("Stokes solve produced non-finite values");

  Solution out;
  const double rhs_norm = rhs.norm();
  out.relative_residual = rhs_norm > 0.0 ? (lu_->eliminated * x - rhs).norm() / rhs_norm : x.norm();
  const Eigen::Index nv = static_cast<Eigen::Index>(space_->velocity_size());
  out.field = FlowField(space_);
  out.field.u = lift + x.head(nv);
  out.field.p = x.tail(static_cast<Eigen::Index>(space_->pressure_size()));
  // Exact trace equality on constrained dofs.
  for (std::size_t d : system_.constrained) out.field.u[static_cast<Eigen::Index>(d)] = lift[static_cast<Eigen::Index>(d)];
  return out;
}

FlowField StokesSolver::solve(const ControlProfile& g, const Eigen::VectorXd& load) const {
  return solve_detailed(g, load).field;
}

FlowField StokesSolver::solve(const ControlProfile& g, const BodyForce& h) const {
  return solve(g, assemble_load(*space_, h));
}

FlowField StokesSolver::solve_lifted(const Eigen::VectorXd& lift, const Eigen::VectorXd& load) const {
  const Eigen::VectorXd rhs = constrained_rhs(full_, system_.constrained, lift, load);
  const Eigen::VectorXd x = lu_->solve(rhs);
  const Eigen::Index nv = static_cast<Eigen::Index>(space_->velocity_size());
  FlowField field(space_);
  field.u = lift + x.head(nv);
  field.p = x.tail(static_cast<Eigen::Index>(space_->pressure_size()));
  return field;
}

FlowField solve_stokes(std::shared_ptr<const FESpace> space, double nu, const ControlProfile& g,
                       const BodyForce& h) {
  const StokesSolver solver(std::move(space), nu);
  return solver.solve(g, h);
}

double weak_residual(const StokesSolver& solver, const FlowField& field, const ControlProfile& g,
                     const Eigen::VectorXd& load, bool convection) {
  field.check();
  const FESpace& space = solver.space();
  const auto& sys = solver.system();
  Eigen::VectorXd r = sys.A * field.u + sys.B.transpose() * field.p - load;
  if (convection) r += assemble_load(space, BodyForce::convective(solver.space_ptr(), field.u));
  const Eigen::VectorXd div = sys.B * field.u;
  const Eigen::VectorXd lift = inlet_lifting(space, g);

  std::vector<char> fixed(space.velocity_size(), 0);
  for (std::size_t d : sys.constrained) fixed[d] = 1;
  const auto& vn = solver.velocity_basis_norms();
  const auto& pn = solver.pressure_basis_norms();
  const std::size_t ns = space.scalar_count();

  double worst = 0.0;
  for (std::size_t i = 0; i < space.velocity_size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (fixed[i]) {
      worst = std::max(worst, std::abs(field.u[ii] - lift[ii]));
    } else {
      worst = std::max(worst, std::abs(r[ii]) / vn[i % ns]);
    }
  }
  for (std::size_t k = 0; k < space.pressure_size(); ++k) {
    worst = std::max(worst, std::abs(div[static_cast<Eigen::Index>(k)]) / pn[k]);
  }
  return worst;
}

double stokes_residual(const StokesSolver& solver, const FlowField& field, const ControlProfile& g,
                       const BodyForce& h) {
  return weak_residual(solver, field, g, assemble_load(solver.space(), h), false);
}

EstimateReport verify_stokes_estimate(const StokesSolver& solver, const std::vector<StokesCase>& cases,
                                      double margin_factor) {
  if (cases.size() < 10) throw ParameterError("the Stokes estimate check needs at least 10 cases");
  if (!(margin_factor >= 1.0)) throw ParameterError("margin factor must be at least 1");
  EstimateReport report;
  report.margin_factor = margin_factor;

  std::vector<double> lhs(cases.size()), rhs(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const FlowField u = solver.solve(cases[i].g, cases[i].h);
    lhs[i] = h1_norm_sq(solver.space(), u.u);
    const double hn = cases[i].h.l32_norm();
    rhs[i] = boundary_h01_norm_sq(cases[i].g) + hn * hn;
  }

  double c = 0.0;
  bool informative = false;
  for (std::size_t i = 0; i < cases.size(); i += 2) {
    ++report.calibration_count;
    if (rhs[i] > 0.0) {
      informative = true;
      c = std::max(c, lhs[i] / rhs[i]);
    }
  }
  report.degenerate = !informative || c == 0.0;
  report.fitted_c = c;

  for (std::size_t i = 1; i < cases.size(); i += 2) {
    ++report.holdout_count;
    const double bound = margin_factor * c * rhs[i];
    const double margin = lhs[i] > 0.0 ? bound / lhs[i] : std::numeric_limits<double>::infinity();
    report.holdout_margins.push_back(margin);
    if (lhs[i] > bound) ++report.violations;
  }
  return report;
}

}  // namespace inflow
