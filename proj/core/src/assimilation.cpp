#include "inflow/assimilation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "inflow/assembly.hpp"
#include "inflow/errors.hpp"
#include "inflow/norms.hpp"

namespace inflow {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

ControlProfile with_interior(const ControlProfile& like, const Eigen::VectorXd& c) {
  ControlProfile g = like;
  g.set_interior(c);
  return g;
}

}  // namespace

void AdmissibleSet::check() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterError("admissible radius rho must be positive");
}

double control_norm(const ControlProfile& g) { return std::sqrt(boundary_h01_norm_sq(g)); }

bool AdmissibleSet::contains(const ControlProfile& g, double tol) const {
  return control_norm(g) <= rho * (1.0 + tol);
}

ControlProfile project_to_ball(const ControlProfile& g, const AdmissibleSet& set) {
  set.check();
  const double n = control_norm(g);
  if (n <= set.rho) return g;
  ControlProfile out = g.scaled(set.rho / n);
  // Rounding can leave the scaled norm a hair above rho.
  for (int i = 0; i < 4 && control_norm(out) > set.rho; ++i) {
    out = out.scaled(std::nextafter(1.0, 0.0));
  }
  return out;
}

std::optional<double> suggest_radius(const NavierStokesSolver& solver, const ControlProfile& shape,
                                     const BodyForce& f, const std::vector<double>& amplitudes,
                                     double threshold, double safety) {
  std::vector<double> sorted = amplitudes;
  std::sort(sorted.begin(), sorted.end());
  const auto sweep = sweep_contraction(solver, shape, f, sorted);
  std::optional<double> best;
  for (const auto& pt : sweep.points) {
    if (!(pt.contraction <= threshold)) break;
    best = pt.amplitude;
  }
  if (!best) return std::nullopt;
  return safety * *best * control_norm(shape);
}

ReducedProblem::ReducedProblem(std::shared_ptr<const NavierStokesSolver> solver, BodyForce f, CostFunctional cost,
                               PicardOptions picard, StateModel model)
    : solver_(std::move(solver)), f_(std::move(f)), cost_(std::move(cost)), picard_(picard), model_(model) {
  if (&cost_.space() != &solver_->space() || &f_.space() != &solver_->space()) {
    throw ParameterError("solver, force and cost must share one space");
  }
}

FlowField ReducedProblem::state(const ControlProfile& g, const std::optional<FlowField>& warm) const {
  if (model_ == StateModel::Stokes) return solver_->stokes().solve(g, f_);
  return solver_->solve(g, f_, picard_, warm).first;
}

ReducedProblem::Evaluation ReducedProblem::evaluate(const ControlProfile& g,
                                                    const std::optional<FlowField>& warm) const {
  Evaluation e;
  if (model_ == StateModel::Stokes) {
    e.state = solver_->stokes().solve(g, f_);
  } else {
    auto [u, report] = solver_->solve(g, f_, picard_, warm);
    e.state = std::move(u);
    e.report = std::move(report);
  }
  e.cost = cost_.evaluate(e.state, g);
  return e;
}

ReducedProblem::FdGradient ReducedProblem::gradient_fd(const ControlProfile& g, double step,
                                                       unsigned workers) const {
  if (!(step > 0.0)) throw ParameterError("finite-difference step must be positive");
  const Eigen::VectorXd c = g.interior();
  const std::size_t n = static_cast<std::size_t>(c.size());
  FdGradient out;
  out.gradient = Eigen::VectorXd::Constant(c.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<char> bad(n, 0);

  const auto probe = [&](std::size_t i) {
    Eigen::VectorXd cp = c, cm = c;
    cp[idx(i)] += step;
    cm[idx(i)] -= step;
    try {
      const double jp = reduced_cost(with_interior(g, cp));
      const double jm = reduced_cost(with_interior(g, cm));
      out.gradient[idx(i)] = (jp - jm) / (2.0 * step);
    } catch (const DivergenceError&) {
      bad[i] = 1;
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) probe(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) probe(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (bad[i]) out.flagged.push_back(i);
  }
  return out;
}

Eigen::VectorXd ReducedProblem::gradient_adjoint(const ControlProfile& g, const FlowField& state) const {
  g.check_against(space());
  state.check();
  const FESpace& sp = space();
  const auto& sys = solver_->stokes().system();
  const std::size_t nv = sp.velocity_size();
  const std::size_t n = nv + sp.pressure_size();

  SparseMatrix full;
  if (model_ == StateModel::NavierStokes) {
    const SparseMatrix lin = assemble_convection(sp, state.u) + assemble_convection_derivative(sp, state.u);
    full = saddle_matrix(sys, &lin);
  } else {
    full = solver_->stokes().full_matrix();
  }
  const SparseMatrix eliminated = eliminate_constraints(full, sys.constrained);
  const SparseMatrix transposed = eliminated.transpose();

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(transposed);
  if (lu.info() != Eigen::Success) throw SolverError("adjoint factorization failed: " + lu.lastErrorMessage());

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(idx(n));
  rhs.head(idx(nv)) = cost_.state_gradient(state.u);
  Eigen::VectorXd rhs_free = rhs;
  for (std::size_t d : sys.constrained) rhs_free[idx(d)] = 0.0;
  Eigen::VectorXd lambda = lu.solve(rhs_free);
  if (!lambda.allFinite()) throw SolverError("adjoint solve produced non-finite values");
  for (std::size_t d : sys.constrained) lambda[idx(d)] = 0.0;

  // Constrained rows of the Jacobian are identity rows, so their multipliers
  // are fixed by the free ones: lambda_C = rhs_C - K_FC^T lambda_F.
  const Eigen::VectorXd coupling = full.transpose() * lambda;

  Eigen::VectorXd grad = cost_.control_gradient(g);
  const auto& chain = sp.inlet_chain();
  const std::size_t m = chain.size() - 2;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto d = idx(sp.velocity_dof(c, chain[i + 1]));
      grad[idx(c * m + i)] += rhs[d] - coupling[d];
    }
  }
  return grad;
}

Eigen::VectorXd ReducedProblem::gradient_adjoint(const ControlProfile& g) const {
  return gradient_adjoint(g, state(g));
}

double relative_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& reference) {
  const double den = reference.norm();
  const double num = (approx - reference).norm();
  return den > 0.0 ? num / den : num;
}

ControlMetric::ControlMetric(const FESpace& space) {
  const auto& s = space.inlet_params();
  const Eigen::MatrixXd g = inlet_mass_matrix(s) + inlet_stiffness_matrix(s);
  const Eigen::Index m = idx(s.size() - 2);
  block_ = g.block(1, 1, m, m);
  factor_.compute(block_);
}

double ControlMetric::dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const Eigen::Index m = block_.rows();
  return a.head(m).dot(block_ * b.head(m)) + a.tail(m).dot(block_ * b.tail(m));
}

double ControlMetric::norm(const Eigen::VectorXd& a) const { return std::sqrt(std::max(0.0, dot(a, a))); }

Eigen::VectorXd ControlMetric::riesz(const Eigen::VectorXd& v) const {
  const Eigen::Index m = block_.rows();
  Eigen::VectorXd out(v.size());
  out.head(m) = factor_.solve(v.head(m));
  out.tail(m) = factor_.solve(v.tail(m));
  return out;
}

AssimilationReport assimilate(const ReducedProblem& problem, const AdmissibleSet& set, const ControlProfile& g0,
                              const AssimilationOptions& options, const std::optional<ControlProfile>& truth) {
  set.check();
  g0.check_against(problem.space());
  if (options.max_iter < 0) throw ParameterError("optimizer max_iter must be nonnegative");
  if (!(options.gtol >= 0.0)) throw ParameterError("optimizer gtol must be nonnegative");
  if (!(options.armijo_sigma > 0.0 && options.armijo_sigma < 1.0)) {
    throw ParameterError("Armijo constant must lie in (0, 1)");
  }
  if (!(options.initial_step > 0.0)) throw ParameterError("initial step must be positive");
  const double n0 = control_norm(g0);
  if (!set.contains(g0)) {
    throw ParameterError("infeasible initial control: ||g0|| = " + std::to_string(n0) +
                         " exceeds rho = " + std::to_string(set.rho));
  }

  const ControlMetric metric(problem.space());
  const auto gradient_at = [&](const ControlProfile& g, const FlowField& u) {
    if (options.gradient == GradientKind::Adjoint) return problem.gradient_adjoint(g, u);
    auto fd = problem.gradient_fd(g, options.fd_step);
    if (!fd.flagged.empty()) throw DivergenceError("state diverged at a finite-difference probe", {});
    return fd.gradient;
  };
  const auto project = [&](const ControlProfile& like, const Eigen::VectorXd& c, bool& active) {
    const ControlProfile raw = with_interior(like, c);
    const ControlProfile p = project_to_ball(raw, set);
    active = p.gx != raw.gx || p.gy != raw.gy;
    return p;
  };

  AssimilationReport report;
  ControlProfile g = g0;
  auto current = problem.evaluate(g);
  Eigen::VectorXd grad = gradient_at(g, current.state);
  report.initial_J = current.cost.J;
  double alpha = options.initial_step;
  double last_step = 0.0;
  bool last_projected = false;
  int last_trials = 0;

  const auto finish = [&] {
    report.final_g = g;
    report.final_state = current.state;
    if (truth) {
      const double tn = control_norm(*truth);
      ControlProfile diff = g;
      for (std::size_t i = 0; i < diff.size(); ++i) {
        diff.gx[i] -= truth->gx[i];
        diff.gy[i] -= truth->gy[i];
      }
      const double dn = control_norm(diff);
      report.recovery_error = tn > 0.0 ? dn / tn : dn;
    }
  };

  for (int k = 0;; ++k) {
    const Eigen::VectorXd c = g.interior();
    const Eigen::VectorXd d = metric.riesz(grad);
    bool dummy = false;
    const Eigen::VectorXd pg = c - project(g, c - d, dummy).interior();

    AssimilationIteration row;
    row.k = k;
    row.cost = current.cost;
    row.grad_norm = metric.norm(pg);
    row.step = last_step;
    row.projected = last_projected;
    row.trials = last_trials;
    row.picard_iterations = current.report.iterations();
    row.control_norm = control_norm(g);
    report.history.push_back(row);

    if (row.grad_norm <= options.gtol) {
      report.converged = true;
      report.stop_reason = "gtol";
      break;
    }
    if (k >= options.max_iter) {
      report.stop_reason = "max_iter";
      break;
    }

    double step = alpha;
    bool accepted = false;
    int trials = 0;
    ControlProfile g_new;
    ReducedProblem::Evaluation trial;
    bool active = false;
    for (; trials <= options.max_halvings; ++trials, step *= 0.5) {
      g_new = project(g, c - step * d, active);
      const Eigen::VectorXd dc = g_new.interior() - c;
      const double expected = grad.dot(dc);
      try {
        trial = problem.evaluate(g_new, current.state);
      } catch (const DivergenceError&) {
        continue;
      }
      if (expected < 0.0 && trial.cost.J <= current.cost.J + options.armijo_sigma * expected) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      report.stop_reason = "stagnation";
      finish();
      throw StagnationError("line search failed after " + std::to_string(options.max_halvings) +
                                " step halvings at iteration " + std::to_string(k),
                            std::move(report));
    }

    Eigen::VectorXd grad_new = gradient_at(g_new, trial.state);
    const Eigen::VectorXd s = g_new.interior() - c;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (options.bb_step && sy > 0.0) {
      alpha = std::clamp(metric.dot(s, s) / sy, 1e-10, 1e10);
    } else {
      alpha = std::min(2.0 * step, 1e10);
    }
    last_step = step;
    last_projected = active;
    last_trials = trials + 1;
    g = std::move(g_new);
    current = std::move(trial);
    grad = std::move(grad_new);
  }
  finish();
  return report;
}

}  // namespace inflow
