#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "inflow/errors.hpp"
#include "inflow/norms.hpp"
#include "inflow/stokes.hpp"
#include "inflow/synthetic.hpp"
#include "support/oracles.hpp"

using namespace inflow;

namespace {

/// Inlet data read off an analytic field at the inlet chain nodes.
template <class Exact>
ControlProfile inlet_from(const FESpace& space, const Exact& exact) {
  ControlProfile g = ControlProfile::zero(space);
  const auto& chain = space.inlet_chain();
  for (std::size_t k = 1; k + 1 < chain.size(); ++k) {
    const Point& p = space.scalar_points()[chain[k]];
    const Vec2 v = exact.u(p.x, p.y);
    g.gx[k] = v.x();
    g.gy[k] = v.y();
  }
  return g;
}

BodyForce zero_force(const std::shared_ptr<const FESpace>& space) {
  return BodyForce::from_function(space, [](const Point&) -> Vec2 { return Vec2::Zero(); });
}

}  // namespace

TEST_SUITE("stokes") {

TEST_CASE("Poiseuille flow is reproduced to rounding") {
  const oracle::Poiseuille exact{0.1, 1.0, 5.0};
  const auto space = oracle::channel_space(5.0, 1.0, 20, 4);
  const StokesSolver solver(space, exact.nu);
  const ControlProfile g = make_profile(*space, ProfileKind::Parabolic, 1.0);
  const auto sol = solver.solve_detailed(g, assemble_load(*space, zero_force(space)));
  CHECK(sol.relative_residual < 1e-12);
  const auto [eu, ep] = oracle::flow_errors_sq(*space, sol.field.u, sol.field.p, exact);
  CHECK(std::sqrt(eu) < 1e-10);
  CHECK(std::sqrt(ep) < 1e-10);
  CHECK(stokes_residual(solver, sol.field, g, zero_force(space)) < 1e-10);
  CHECK(weak_divergence_max(*space, sol.field.u) < 1e-12);
}

TEST_CASE("manufactured solution converges at second order") {
  const oracle::StokesMms exact{1.0};
  double prev_u = 0.0, prev_p = 0.0;
  for (std::size_t n : {4u, 8u, 16u}) {
    const auto space = oracle::channel_space(1.0, 1.0, n, n);
    const StokesSolver solver(space, exact.nu);
    const auto f = BodyForce::from_function(space, [&](const Point& p) { return exact.force(p.x, p.y); });
    const FlowField sol = solver.solve(inlet_from(*space, exact), f);
    const auto [eu, ep] = oracle::flow_errors_sq(*space, sol.u, sol.p, exact);
    if (prev_u > 0.0) {
      CHECK(std::log2(prev_u / std::sqrt(eu)) > 1.7);
      CHECK(std::log2(prev_p / std::sqrt(ep)) > 1.7);
    }
    prev_u = std::sqrt(eu);
    prev_p = std::sqrt(ep);
  }
  CHECK(prev_u < 1e-2);
}

TEST_CASE("solution does not depend on the lifting or the ordering") {
  const auto space = oracle::channel_space(5.0, 1.0, 12, 4, Stenosis{0.3, 2.5, 1.0});
  const StokesSolver colamd(space, 0.1, Ordering::Colamd);
  const StokesSolver amd(space, 0.1, Ordering::Amd);
  std::mt19937_64 rng(21);
  const ControlProfile g = random_profile(*space, rng, 1.0);
  const Eigen::VectorXd load = assemble_load(*space, random_force(space, rng, 1.0));

  const FlowField a = colamd.solve(g, load);
  const FlowField b = amd.solve(g, load);
  CHECK((a.u - b.u).norm() <= 1e-12 * a.u.norm());
  CHECK((a.p - b.p).norm() <= 1e-11 * a.p.norm());

  Eigen::VectorXd lift = inlet_lifting(*space, g);
  std::normal_distribution<double> n;
  std::vector<bool> fixed(space->velocity_size(), false);
  for (auto d : space->dirichlet_dofs()) fixed[d] = true;
  for (Eigen::Index i = 0; i < lift.size(); ++i) {
    if (!fixed[static_cast<std::size_t>(i)]) lift[i] = n(rng);
  }
  const FlowField c = colamd.solve_lifted(lift, load);
  CHECK((a.u - c.u).norm() <= 1e-11 * a.u.norm());
  CHECK((a.p - c.p).norm() <= 1e-10 * a.p.norm());
}

TEST_CASE("solution operator is linear") {
  const auto space = oracle::channel_space(3.0, 1.0, 9, 3);
  const StokesSolver solver(space, 0.5);
  std::mt19937_64 rng(4);
  const ControlProfile g1 = random_profile(*space, rng, 1.0), g2 = random_profile(*space, rng, 1.0);
  const BodyForce h1 = random_force(space, rng, 1.0), h2 = random_force(space, rng, 1.0);
  const FlowField s1 = solver.solve(g1, h1), s2 = solver.solve(g2, h2);
  const FlowField s = solver.solve(g1.scaled(2.0) + g2, 2.0 * h1 + h2);
  CHECK((s.u - 2.0 * s1.u - s2.u).norm() <= 1e-12 * s.u.norm());
  CHECK((s.p - 2.0 * s1.p - s2.p).norm() <= 1e-11 * s.p.norm());
}

TEST_CASE("a-priori estimate on random data") {
  const auto space = oracle::channel_space(5.0, 1.0, 20, 4, Stenosis{0.3, 2.5, 1.0});
  const StokesSolver solver(space, 0.1);
  std::mt19937_64 rng(8);
  const auto cases = random_stokes_cases(space, rng, 30, 1.0, 1.0);
  const EstimateReport r = verify_stokes_estimate(solver, cases);
  CHECK_FALSE(r.degenerate);
  CHECK(r.calibration_count == 15);
  CHECK(r.holdout_count == 15);
  CHECK(r.violations == 0);
  CHECK(r.fitted_c > 0.0);
  for (double m : r.holdout_margins) CHECK(m >= 1.0);

  // the fitted ratio is scale invariant: S is linear and the bound quadratic
  std::vector<StokesCase> scaled;
  for (const auto& c : cases) scaled.push_back({c.g.scaled(3.0), 3.0 * c.h});
  CHECK(verify_stokes_estimate(solver, scaled).fitted_c == doctest::Approx(r.fitted_c).epsilon(1e-9));

  CHECK_THROWS_AS(verify_stokes_estimate(solver, std::vector<StokesCase>(cases.begin(), cases.begin() + 9)),
                  ParameterError);
  std::vector<StokesCase> zeros(10, StokesCase{ControlProfile::zero(*space), zero_force(space)});
  CHECK(verify_stokes_estimate(solver, zeros).degenerate);
}

TEST_CASE("invalid solver inputs") {
  const auto space = oracle::channel_space(2.0, 1.0, 4, 2);
  CHECK_THROWS_AS(StokesSolver(space, 0.0), ParameterError);
  CHECK_THROWS_AS(StokesSolver(space, -1.0), ParameterError);
  const StokesSolver solver(space, 1.0);
  const auto other = oracle::channel_space(2.0, 1.0, 4, 3);
  CHECK_THROWS_AS(solver.solve(ControlProfile::zero(*other), zero_force(space)), InvariantError);
}

}  // TEST_SUITE
