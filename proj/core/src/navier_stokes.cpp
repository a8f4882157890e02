#include "inflow/navier_stokes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "inflow/norms.hpp"

namespace inflow {

double PicardReport::max_ratio() const {
  double worst = 0.0;
  for (const auto& it : history) {
    if (it.k >= 2 && std::isfinite(it.ratio)) worst = std::max(worst, it.ratio);
  }
  return worst;
}

NavierStokesSolver::NavierStokesSolver(std::shared_ptr<const StokesSolver> stokes) : stokes_(std::move(stokes)) {}

NavierStokesSolver::NavierStokesSolver(std::shared_ptr<const FESpace> space, double nu)
    : stokes_(std::make_shared<const StokesSolver>(std::move(space), nu)) {}

namespace {

BodyForce picard_rhs(const NavierStokesSolver& solver, const BodyForce& f, const Eigen::VectorXd& u) {
  return f - BodyForce::convective(solver.stokes().space_ptr(), u);
}

double velocity_h1_distance(const FESpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt(h1_norm_sq(space, a - b));
}

}  // namespace

FlowField NavierStokesSolver::picard_step(const ControlProfile& g, const BodyForce& f,
                                          const FlowField& current) const {
  current.check();
  return stokes_->solve(g, picard_rhs(*this, f, current.u));
}

std::pair<FlowField, PicardReport> NavierStokesSolver::solve(const ControlProfile& g, const BodyForce& f,
                                                             const PicardOptions& options,
                                                             const std::optional<FlowField>& initial) const {
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw ParameterError("damping must lie in (0, 1]");
  if (!(options.tol > 0.0)) throw ParameterError("Picard tolerance must be positive");
  if (options.max_iter < 1) throw ParameterError("max_iter must be at least 1");
  g.check_against(space());

  FlowField u = initial ? *initial : stokes_->solve(g, f);
  u.check();
  BodyForce h_prev = f;
  double prev_h_update = std::numeric_limits<double>::quiet_NaN();
  PicardReport report;

  for (int k = 1; k <= options.max_iter; ++k) {
    const BodyForce h = picard_rhs(*this, f, u.u);
    const Eigen::VectorXd load = assemble_load(space(), h);
    FlowField next = stokes_->solve(g, load);
    if (options.damping < 1.0) {
      next.u = options.damping * next.u + (1.0 - options.damping) * u.u;
      next.p = options.damping * next.p + (1.0 - options.damping) * u.p;
    }

    PicardIteration it;
    it.k = k;
    it.update_h1 = velocity_h1_distance(space(), next.u, u.u);
    it.h_update_l32 = (h - h_prev).l32_norm();
    it.ratio = k >= 2 && prev_h_update > 0.0 ? it.h_update_l32 / prev_h_update
                                              : std::numeric_limits<double>::quiet_NaN();
    prev_h_update = it.h_update_l32;
    h_prev = h;
    u = std::move(next);
    it.residual = residual(u, g, f);
    report.history.push_back(it);

    if (!std::isfinite(it.update_h1) || it.update_h1 > 1e12) {
      report.final_residual = it.residual;
      const std::string message = "Picard iteration diverged at iteration " + std::to_string(k);
      throw DivergenceError(message, std::move(report));
    }
    if (it.update_h1 <= options.tol) {
      report.converged = true;
      report.final_residual = it.residual;
      return {std::move(u), std::move(report)};
    }
  }
  report.final_residual = report.history.back().residual;
  const std::string message = "Picard iteration did not converge in " + std::to_string(options.max_iter) +
                              " iterations (last update " + std::to_string(report.history.back().update_h1) + ")";
  throw DivergenceError(message, std::move(report));
}

double NavierStokesSolver::residual(const FlowField& field, const ControlProfile& g, const BodyForce& f) const {
  return weak_residual(*stokes_, field, g, assemble_load(space(), f), true);
}

BodyForce NavierStokesSolver::contraction_map(const ControlProfile& g, const BodyForce& f,
                                              const BodyForce& h) const {
  const FlowField u = stokes_->solve(g, h);
  return picard_rhs(*this, f, u.u);
}

ContractionEstimate estimate_contraction(const NavierStokesSolver& solver, const ControlProfile& g,
                                         const BodyForce& f,
                                         const std::vector<std::pair<BodyForce, BodyForce>>& probes) {
  ContractionEstimate out;
  for (const auto& [h1, h2] : probes) {
    const double den = (h1 - h2).l32_norm();
    if (!(den > 0.0)) {
      ++out.skipped;
      continue;
    }
    const double num = (solver.contraction_map(g, f, h1) - solver.contraction_map(g, f, h2)).l32_norm();
    const double ratio = num / den;
    out.ratios.push_back(ratio);
    if (std::isfinite(ratio)) {
      out.max_ratio = std::max(out.max_ratio, ratio);
    } else {
      out.max_ratio = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

std::vector<std::pair<BodyForce, BodyForce>> picard_probes(const NavierStokesSolver& solver,
                                                           const ControlProfile& g, const BodyForce& f,
                                                           std::size_t count) {
  std::vector<std::pair<BodyForce, BodyForce>> probes;
  BodyForce h = solver.contraction_map(g, f, BodyForce(solver.stokes().space_ptr()));
  for (std::size_t i = 0; i < count; ++i) {
    BodyForce next = solver.contraction_map(g, f, h);
    const double size = next.l32_norm();
    if (!std::isfinite(size) || size > 1e12) break;
    probes.emplace_back(h, next);
    h = std::move(next);
  }
  return probes;
}

std::vector<std::pair<BodyForce, BodyForce>> random_probes(const BodyForce& base, std::size_t count,
                                                           double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto& space = base.space_ptr();
  const auto random_field = [&] {
    std::array<double, 8> c{};
    for (auto& v : c) v = coef(rng);
    return BodyForce::from_function(space, [c, scale](const Point& p) {
      const double pi = std::numbers::pi;
      return Vec2(scale * (c[0] * std::sin(pi * p.x) + c[1] * std::cos(pi * p.y) + c[2] * std::sin(2 * pi * p.y) +
                           c[3] * p.x * p.y),
                  scale * (c[4] * std::cos(pi * p.x) + c[5] * std::sin(pi * p.y) + c[6] * std::cos(2 * pi * p.x) +
                           c[7] * (p.x - p.y)));
    });
  };
  std::vector<std::pair<BodyForce, BodyForce>> probes;
  for (std::size_t i = 0; i < count; ++i) {
    BodyForce a = base + random_field();
    BodyForce b = base + random_field();
    probes.emplace_back(std::move(a), std::move(b));
  }
  return probes;
}

ContractionSweep sweep_contraction(const NavierStokesSolver& solver, const ControlProfile& shape,
                                   const BodyForce& f, const std::vector<double>& amplitudes,
                                   const PicardOptions& options, std::size_t probe_count) {
  ContractionSweep sweep;
  for (double a : amplitudes) {
    SweepPoint pt;
    pt.amplitude = a;
    const ControlProfile g = shape.scaled(a);
    const auto probes = picard_probes(solver, g, f, probe_count);
    const auto est = estimate_contraction(solver, g, f, probes);
    pt.contraction = probes.size() < probe_count ? std::numeric_limits<double>::infinity() : est.max_ratio;
    try {
      const auto result = solver.solve(g, f, options);
      pt.converged = true;
      pt.iterations = result.second.iterations();
    } catch (const DivergenceError& e) {
      pt.converged = false;
      pt.iterations = e.report().iterations();
    }
    sweep.points.push_back(pt);
  }
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    if (sweep.points[i].contraction > 1.0) {
      if (i > 0) sweep.crossing = std::make_pair(sweep.points[i - 1].amplitude, sweep.points[i].amplitude);
      break;
    }
  }
  return sweep;
}

EstimateReport verify_ns_estimate(const NavierStokesSolver& solver, const std::vector<NsCase>& cases,
                                  const PicardOptions& options, double margin_factor) {
  if (!(margin_factor >= 1.0)) throw ParameterError("margin factor must be at least 1");
  EstimateReport report;
  report.margin_factor = margin_factor;

  struct Entry {
    double lhs, s, f2;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    try {
      const auto [u, rep] = solver.solve(cases[i].g, cases[i].f, options);
      const double fn = cases[i].f.l32_norm();
      entries.push_back({h1_norm_sq(solver.space(), u.u), boundary_h01_norm_sq(cases[i].g), fn * fn});
    } catch (const DivergenceError&) {
      report.excluded.push_back(i);
    }
  }

  double c = 0.0;
  bool informative = false;
  for (std::size_t i = 0; i < entries.size(); i += 2) {
    ++report.calibration_count;
    const auto& e = entries[i];
    const double scale = e.s * e.s + e.s;
    if (scale > 0.0) {
      informative = true;
      c = std::max(c, (e.lhs - e.f2) / scale);
    } else if (e.lhs > e.f2) {
      ++report.violations;  // no constant can cover this case
    }
  }
  report.degenerate = !informative;
  report.fitted_c = c;
  for (std::size_t i = 1; i < entries.size(); i += 2) {
    ++report.holdout_count;
    const auto& e = entries[i];
    const double bound = margin_factor * c * (e.s * e.s + e.s) + e.f2;
    report.holdout_margins.push_back(e.lhs > 0.0 ? bound / e.lhs : std::numeric_limits<double>::infinity());
    if (e.lhs > bound) ++report.violations;
  }
  return report;
}

}  // namespace inflow
