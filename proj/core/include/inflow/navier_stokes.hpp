#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "inflow/body_force.hpp"
#include "inflow/errors.hpp"
#include "inflow/stokes.hpp"

namespace inflow {

struct PicardOptions {
  double tol = 1e-8;    // on the H^1 norm of the velocity update
  int max_iter = 50;
  double damping = 1.0; // theta in (0, 1]
};

struct PicardIteration {
  int k = 0;
  double update_h1 = 0.0;      // ||u_k - u_{k-1}||_{H^1}
  double h_update_l32 = 0.0;   // ||h_{k+1} - h_k||_{L^{3/2}}
  double ratio = 0.0;          // h_update_l32 ratio; NaN for k < 2
  double residual = 0.0;       // weak Navier-Stokes residual of u_k
};

struct PicardReport {
  std::vector<PicardIteration> history;
  bool converged = false;
  double final_residual = 0.0;

  int iterations() const { return static_cast<int>(history.size()); }
  /// Largest reported contraction ratio (k >= 2), 0 when none.
  double max_ratio() const;
};

/// Picard iteration failed to reach the tolerance; carries the history.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, PicardReport report)
      : Error(what), report_(std::move(report)) {}
  const PicardReport& report() const { return report_; }

 private:
  PicardReport report_;
};

/// Steady Navier-Stokes by the fixed-point map u -> S(g, f - u.grad(u)):
/// the convective term is moved to the right-hand side and every step is
/// one solve with the prefactorized Stokes operator.
class NavierStokesSolver {
 public:
  explicit NavierStokesSolver(std::shared_ptr<const StokesSolver> stokes);
  NavierStokesSolver(std::shared_ptr<const FESpace> space, double nu);

  const StokesSolver& stokes() const { return *stokes_; }
  const std::shared_ptr<const StokesSolver>& stokes_ptr() const { return stokes_; }
  const FESpace& space() const { return stokes_->space(); }
  double viscosity() const { return stokes_->viscosity(); }

  /// u_{k+1} = S(g, f - u_k . grad u_k)
  FlowField picard_step(const ControlProfile& g, const BodyForce& f, const FlowField& current) const;

  /// Iterates from u_0 = S(g, f) (or `initial`) until the H^1 update drops
  /// below options.tol. Throws DivergenceError with the report otherwise.
  std::pair<FlowField, PicardReport> solve(const ControlProfile& g, const BodyForce& f,
                                           const PicardOptions& options = {},
                                           const std::optional<FlowField>& initial = std::nullopt) const;

  /// Weak residual including the convective term (see weak_residual()).
  double residual(const FlowField& field, const ControlProfile& g, const BodyForce& f) const;

  /// The map C(h) = f - S(g,h) . grad S(g,h) sampled at quadrature points.
  BodyForce contraction_map(const ControlProfile& g, const BodyForce& f, const BodyForce& h) const;

 private:
  std::shared_ptr<const StokesSolver> stokes_;
};

struct ContractionEstimate {
  double max_ratio = 0.0;
  std::vector<double> ratios;
  std::size_t skipped = 0;  // probe pairs with identical members
};

/// max ||C(h1) - C(h2)||_{L^{3/2}} / ||h1 - h2||_{L^{3/2}} over the probe pairs.
ContractionEstimate estimate_contraction(const NavierStokesSolver& solver, const ControlProfile& g,
                                         const BodyForce& f,
                                         const std::vector<std::pair<BodyForce, BodyForce>>& probes);

/// Consecutive pairs (h_k, h_{k+1}) of the sequence h_1 = C(0), h_{k+1} = C(h_k).
std::vector<std::pair<BodyForce, BodyForce>> picard_probes(const NavierStokesSolver& solver,
                                                           const ControlProfile& g, const BodyForce& f,
                                                           std::size_t count);

/// Random smooth perturbation pairs (h_base + d1, h_base + d2) with ||d|| ~ scale.
std::vector<std::pair<BodyForce, BodyForce>> random_probes(const BodyForce& base, std::size_t count,
                                                           double scale, std::uint64_t seed);

struct SweepPoint {
  double amplitude = 0.0;
  double contraction = 0.0;   // empirical c-bar
  bool converged = false;     // Picard outcome at this amplitude
  int iterations = 0;
};

struct ContractionSweep {
  std::vector<SweepPoint> points;
  /// Amplitudes bracketing the first crossing of c-bar over 1, if any.
  std::optional<std::pair<double, double>> crossing;
};

/// Scales `shape` by each amplitude and records the empirical contraction
/// constant along the Picard probes together with the Picard outcome.
ContractionSweep sweep_contraction(const NavierStokesSolver& solver, const ControlProfile& shape,
                                   const BodyForce& f, const std::vector<double>& amplitudes,
                                   const PicardOptions& options = {}, std::size_t probe_count = 6);

struct NsCase {
  ControlProfile g;
  BodyForce f;
};

/// Checks ||u||_{H^1}^2 <= alpha(s) + ||f||_{L^{3/2}}^2 with alpha(s) = c (s^2 + s) and
/// s = ||g||^2_{H^1_0}. Held-out cases use margin_factor * c.
/// Non-converged cases are excluded and listed. c is fitted on the
/// even-indexed converged cases and tested on the odd-indexed ones.
EstimateReport verify_ns_estimate(const NavierStokesSolver& solver, const std::vector<NsCase>& cases,
                                  const PicardOptions& options = {}, double margin_factor = 2.0);

}  // namespace inflow
