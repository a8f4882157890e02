#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "inflow/errors.hpp"
#include "inflow/navier_stokes.hpp"
#include "inflow/norms.hpp"
#include "inflow/synthetic.hpp"
#include "support/oracles.hpp"

using namespace inflow;

namespace {

BodyForce zero_force(const std::shared_ptr<const FESpace>& space) {
  return BodyForce::from_function(space, [](const Point&) -> Vec2 { return Vec2::Zero(); });
}

std::shared_ptr<const FESpace> stenosed(std::size_t nx = 20, std::size_t ny = 4) {
  return oracle::channel_space(5.0, 1.0, nx, ny, Stenosis{0.3, 2.5, 1.0});
}

}  // namespace

TEST_SUITE("navier_stokes") {

TEST_CASE("Poiseuille flow is an exact fixed point") {
  const oracle::Poiseuille exact{0.1, 1.0, 5.0};
  const auto space = oracle::channel_space(5.0, 1.0, 20, 4);
  const NavierStokesSolver solver(space, exact.nu);
  const ControlProfile g = make_profile(*space, ProfileKind::Parabolic, 1.0);
  const auto [u, report] = solver.solve(g, zero_force(space));
  CHECK(report.converged);
  CHECK(report.iterations() <= 3);
  const auto [eu, ep] = oracle::flow_errors_sq(*space, u.u, u.p, exact);
  CHECK(std::sqrt(eu) < 1e-8);
  CHECK(std::sqrt(ep) < 1e-8);
  CHECK(solver.residual(u, g, zero_force(space)) < 1e-8);
}

TEST_CASE("manufactured Navier-Stokes solution converges at second order") {
  const oracle::StokesMms exact{1.0};
  double prev = 0.0;
  for (std::size_t n : {4u, 8u, 16u}) {
    const auto space = oracle::channel_space(1.0, 1.0, n, n);
    const NavierStokesSolver solver(space, exact.nu);
    const auto f = BodyForce::from_function(
        space, [&](const Point& p) -> Vec2 { return exact.force(p.x, p.y) + exact.convection(p.x, p.y); });
    ControlProfile g = ControlProfile::zero(*space);
    const auto& chain = space->inlet_chain();
    for (std::size_t k = 1; k + 1 < chain.size(); ++k) {
      const Point& p = space->scalar_points()[chain[k]];
      g.gy[k] = exact.u(p.x, p.y).y();
    }
    const auto [u, report] = solver.solve(g, f, {1e-12, 50, 1.0});
    CHECK(report.converged);
    const double e = std::sqrt(oracle::flow_errors_sq(*space, u.u, u.p, exact).first);
    if (prev > 0.0) CHECK(std::log2(prev / e) > 1.7);
    prev = e;
  }
}

TEST_CASE("Picard report and fixed point") {
  const auto space = stenosed();
  const NavierStokesSolver solver(space, 0.1);
  const ControlProfile g = make_profile(*space, ProfileKind::Parabolic, 0.5);
  const BodyForce f = zero_force(space);
  const auto [u, report] = solver.solve(g, f, {1e-10, 100, 1.0});
  REQUIRE(report.converged);
  CHECK(std::isnan(report.history[0].ratio));
  for (std::size_t k = 1; k < report.history.size(); ++k) {
    CHECK(report.history[k].k == static_cast<int>(k) + 1);
    if (report.history[k].h_update_l32 > 1e-9) CHECK(report.history[k].ratio < 1.0);
  }
  CHECK(report.max_ratio() < 1.0);
  CHECK(report.history.back().update_h1 <= 1e-10);

  const FlowField again = solver.picard_step(g, f, u);
  CHECK(std::sqrt(h1_norm_sq(*space, again.u - u.u)) < 1e-9);
  CHECK(solver.residual(u, g, f) < 1e-8);
  CHECK(weak_divergence_max(*space, u.u) < 1e-10);

  // damping changes the path, not the limit
  const auto damped = solver.solve(g, f, {1e-10, 200, 0.6});
  CHECK(damped.second.iterations() > report.iterations());
  CHECK(std::sqrt(h1_norm_sq(*space, damped.first.u - u.u)) < 1e-8);

  // warm start from the solution converges at once
  const auto warm = solver.solve(g, f, {1e-10, 5, 1.0}, u);
  CHECK(warm.second.iterations() == 1);
}

TEST_CASE("strong inflow diverges with the history attached") {
  const auto space = stenosed();
  const NavierStokesSolver solver(space, 0.05);
  const ControlProfile g = make_profile(*space, ProfileKind::Parabolic, 4.0);
  bool thrown = false;
  try {
    solver.solve(g, zero_force(space), {1e-8, 30, 1.0});
  } catch (const DivergenceError& e) {
    thrown = true;
    CHECK_FALSE(e.report().converged);
    CHECK(e.report().iterations() >= 1);
    CHECK(e.report().iterations() <= 30);
  }
  CHECK(thrown);
}

TEST_CASE("invalid Picard options") {
  const auto space = stenosed(10, 2);
  const NavierStokesSolver solver(space, 0.1);
  const ControlProfile g = ControlProfile::zero(*space);
  CHECK_THROWS_AS(solver.solve(g, zero_force(space), {1e-8, 50, 0.0}), ParameterError);
  CHECK_THROWS_AS(solver.solve(g, zero_force(space), {1e-8, 50, 1.5}), ParameterError);
  CHECK_THROWS_AS(solver.solve(g, zero_force(space), {0.0, 50, 1.0}), ParameterError);
  CHECK_THROWS_AS(solver.solve(g, zero_force(space), {1e-8, 0, 1.0}), ParameterError);
}

TEST_CASE("empirical contraction grows with the inflow") {
  const auto space = stenosed();
  const NavierStokesSolver solver(space, 0.1);
  const BodyForce f = zero_force(space);
  const ControlProfile shape = make_profile(*space, ProfileKind::Parabolic, 1.0);
  double prev = 0.0;
  for (double a : {0.1, 0.4, 1.6}) {
    const ControlProfile g = shape.scaled(a);
    const auto c = estimate_contraction(solver, g, f, picard_probes(solver, g, f, 6));
    CHECK(c.max_ratio > prev);
    prev = c.max_ratio;
  }
  // small inflow: the map is a strong contraction
  const ControlProfile weak = shape.scaled(0.1);
  const auto c = estimate_contraction(solver, weak, f, picard_probes(solver, weak, f, 6));
  CHECK(c.max_ratio < 0.2);

  // random probe pairs around a base point
  const BodyForce base = BodyForce::convective(space, solver.stokes().solve(weak, f).u);
  const auto probes = random_probes(base, 8, 0.1, 3);
  CHECK(probes.size() == 8);
  CHECK(estimate_contraction(solver, weak, f, probes).max_ratio < 0.2);

  const auto degenerate = estimate_contraction(solver, weak, f, {{base, base}});
  CHECK(degenerate.skipped == 1);
  CHECK(degenerate.ratios.empty());
}

TEST_CASE("contraction sweep brackets the crossing") {
  const auto space = stenosed();
  const NavierStokesSolver solver(space, 0.05);
  const ControlProfile shape = make_profile(*space, ProfileKind::Parabolic, 1.0);
  const auto sweep = sweep_contraction(solver, shape, zero_force(space), {0.25, 0.5, 1.0, 2.0, 4.0});
  REQUIRE(sweep.points.size() == 5);
  CHECK(sweep.points.front().contraction < 1.0);
  CHECK(sweep.points.front().converged);
  REQUIRE(sweep.crossing.has_value());
  CHECK(sweep.points.back().contraction > 1.0);
  CHECK_FALSE(sweep.points.back().converged);
  for (const auto& p : sweep.points) {
    if (p.amplitude <= sweep.crossing->first) CHECK(p.contraction <= 1.0);
  }
}

TEST_CASE("a-priori estimate on random data") {
  const auto space = stenosed();
  const NavierStokesSolver solver(space, 0.1);
  std::mt19937_64 rng(12);
  const auto cases = random_ns_cases(space, rng, 30, 0.3, 0.5);
  const EstimateReport r = verify_ns_estimate(solver, cases);
  CHECK_FALSE(r.degenerate);
  CHECK(r.excluded.empty());
  CHECK(r.calibration_count + r.holdout_count == 30);
  CHECK(r.violations == 0);
  for (double m : r.holdout_margins) CHECK(m >= 1.0);
}

}  // TEST_SUITE
