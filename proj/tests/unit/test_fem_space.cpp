#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <random>

#include "inflow/body_force.hpp"
#include "inflow/errors.hpp"
#include "inflow/fem_space.hpp"
#include "inflow/norms.hpp"
#include "inflow/synthetic.hpp"
#include "support/oracles.hpp"

using namespace inflow;

TEST_SUITE("fem_space") {

TEST_CASE("dof layout on a channel") {
  const auto space = oracle::channel_space(2.0, 1.0, 4, 3);
  const std::size_t edges = 4 * 4 + 5 * 3 + 4 * 3;
  CHECK(space->edge_count() == edges);
  CHECK(space->scalar_count() == 20 + edges);
  CHECK(space->velocity_size() == 2 * (20 + edges));
  CHECK(space->pressure_size() == 20);
  CHECK(space->inlet_chain().size() == 2 * 3 + 1);
  CHECK(space->inlet_params().front() == 0.0);
  CHECK(space->inlet_params().back() == doctest::Approx(1.0));
  CHECK(std::is_sorted(space->inlet_params().begin(), space->inlet_params().end()));

  // inlet corners are wall nodes, never inlet interior nodes
  const auto& wall = space->wall_nodes();
  const auto& chain = space->inlet_chain();
  CHECK(std::binary_search(wall.begin(), wall.end(), chain.front()));
  CHECK(std::binary_search(wall.begin(), wall.end(), chain.back()));
  CHECK(space->inlet_interior_nodes().size() == chain.size() - 2);

  std::vector<std::size_t> both;
  std::set_intersection(space->wall_dofs().begin(), space->wall_dofs().end(), space->inlet_interior_dofs().begin(),
                        space->inlet_interior_dofs().end(), std::back_inserter(both));
  CHECK(both.empty());
  CHECK(space->dirichlet_dofs().size() == space->wall_dofs().size() + space->inlet_interior_dofs().size());
  // wall: 2 * (bottom + top) P2 nodes
  CHECK(space->wall_dofs().size() == 2 * 2 * (2 * 4 + 1));
  CHECK(space->velocity_dof(1, 5) == space->scalar_count() + 5);
}

TEST_CASE("P2 shape functions") {
  const auto space = oracle::channel_space(1.0, 1.0, 2, 2);
  const auto& geo = space->geometry(3);
  for (const auto& [xi, eta] : {std::pair{0.1, 0.2}, std::pair{0.5, 0.25}, std::pair{0.0, 1.0}}) {
    const P2Shape s = p2_shape(geo, xi, eta);
    double sum = 0.0;
    Vec2 gsum = Vec2::Zero();
    for (int i = 0; i < 6; ++i) {
      sum += s.value[i];
      gsum += s.grad[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gsum.norm() < 1e-12);
  }
  const P2Shape at_vertex = p2_shape(geo, 1.0, 0.0);
  CHECK(at_vertex.value[1] == doctest::Approx(1.0));
  for (int i : {0, 2, 3, 4, 5}) CHECK(std::abs(at_vertex.value[i]) < 1e-15);
}

TEST_CASE("quadratic fields are reproduced exactly") {
  const auto space = oracle::channel_space(2.0, 1.0, 5, 3, Stenosis{0.2, 1.0, 0.6});
  const auto fn = [](const Point& p) -> Vec2 {
    return {1.0 + p.x * p.y - 2.0 * p.y * p.y, p.x * p.x - 0.5 * p.x + 3.0 * p.y};
  };
  const Eigen::VectorXd u = interpolate_velocity(*space, fn);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const std::size_t t = static_cast<std::size_t>(k * 7) % space->element_count();
    double xi = r(rng), eta = r(rng);
    if (xi + eta > 1.0) {
      xi = 1.0 - xi;
      eta = 1.0 - eta;
    }
    const auto& geo = space->geometry(t);
    const Point p = geo.map(xi, eta);
    const VelocitySample s = sample_velocity(*space, u, t, p2_shape(geo, xi, eta));
    CHECK((s.value - fn(p)).norm() < 1e-12);
    Mat2 exact;
    exact << p.y, p.x - 4.0 * p.y, 2.0 * p.x - 0.5, 3.0;
    CHECK((s.grad - exact).norm() < 1e-11);
  }
}

TEST_CASE("volume norms against tensor Gauss integration") {
  const auto space = oracle::channel_space(2.0, 1.0, 6, 4);
  const Eigen::VectorXd u = interpolate_velocity(*space, [](const Point& p) -> Vec2 {
    return {p.x * p.x, p.x * p.y - p.y};
  });
  const double l2 = oracle::integrate_rectangle(
      [](double x, double y) { return x * x * x * x + (x * y - y) * (x * y - y); }, 0, 2, 0, 1);
  const double grad = oracle::integrate_rectangle(
      [](double x, double y) { return 4 * x * x + y * y + (x - 1) * (x - 1); }, 0, 2, 0, 1);
  CHECK(l2_norm_sq(*space, u) == doctest::Approx(l2).epsilon(1e-12));
  CHECK(h1_seminorm_sq(*space, u) == doctest::Approx(grad).epsilon(1e-12));
  CHECK(h1_norm_sq(*space, u) == doctest::Approx(l2 + grad).epsilon(1e-12));

  const Eigen::VectorXd p = interpolate_pressure(*space, [](const Point& q) { return 1.0 + q.x - 2.0 * q.y; });
  const double pl2 = oracle::integrate_rectangle(
      [](double x, double y) { return (1 + x - 2 * y) * (1 + x - 2 * y); }, 0, 2, 0, 1);
  CHECK(pressure_l2_sq(*space, p) == doctest::Approx(pl2).epsilon(1e-12));

  // H^1 of (x, 0) on the unit square is 1/3 + 1
  const auto unit = oracle::channel_space(1.0, 1.0, 3, 3);
  const Eigen::VectorXd ux = interpolate_velocity(*unit, [](const Point& q) -> Vec2 { return {q.x, 0.0}; });
  CHECK(h1_norm_sq(*unit, ux) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("convective L3/2 norm") {
  // u = (x, -y): (u . grad) u = (x, y)
  const auto space = oracle::channel_space(1.0, 1.0, 16, 16);
  const Eigen::VectorXd u = interpolate_velocity(*space, [](const Point& p) -> Vec2 { return {p.x, -p.y}; });
  const double integral = oracle::integrate_rectangle(
      [](double x, double y) { return std::pow(x * x + y * y, 0.75); }, 0, 1, 0, 1);
  const double exact = std::pow(integral, 2.0 / 3.0);
  CHECK(l32_convective_norm(*space, u) == doctest::Approx(exact).epsilon(1e-5));
  const BodyForce conv = BodyForce::convective(space, u);
  CHECK(conv.l32_norm() == doctest::Approx(l32_convective_norm(*space, u)).epsilon(1e-14));

  // L3/2 norm of a constant force is |c| * area^(2/3)
  const BodyForce c = BodyForce::from_function(space, [](const Point&) -> Vec2 { return {3.0, 4.0}; });
  CHECK(c.l32_norm() == doctest::Approx(5.0).epsilon(1e-13));
  CHECK((2.0 * c).l32_norm() == doctest::Approx(10.0).epsilon(1e-13));
  CHECK((c - c).l32_norm() == 0.0);
}

TEST_CASE("divergence measures") {
  const auto space = oracle::channel_space(2.0, 1.0, 8, 4);
  const Eigen::VectorXd free = interpolate_velocity(*space, [](const Point& p) -> Vec2 {
    return {p.x * p.x + 4 * p.y * (1 - p.y), -2 * p.x * p.y};
  });
  CHECK(divergence_l2(*space, free) < 1e-12);
  CHECK(weak_divergence_max(*space, free) < 1e-12);
  const Eigen::VectorXd stretch = interpolate_velocity(*space, [](const Point& p) -> Vec2 { return {p.x, 0}; });
  CHECK(divergence_l2(*space, stretch) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(weak_divergence_max(*space, stretch) > 0.1);
}

TEST_CASE("inlet norms match the quadratic interpolant") {
  const auto space = oracle::channel_space(5.0, 1.0, 10, 16);
  const ControlProfile g = make_profile(*space, ProfileKind::Sine, 1.0, ProfileComponents::XY);
  const auto [l2, grad] = oracle::inlet_integrals(g);
  CHECK(boundary_l2_norm_sq(g) == doctest::Approx(l2).epsilon(1e-12));
  CHECK(boundary_grad_norm_sq(g) == doctest::Approx(grad).epsilon(1e-12));
  CHECK(boundary_h01_norm_sq(g) == doctest::Approx(l2 + grad).epsilon(1e-12));
  // and the interpolant is close to the analytic sin(pi s): 1/2 + pi^2/2 per component
  const double analytic = 2 * (0.5 + std::numbers::pi * std::numbers::pi / 2);
  CHECK(boundary_h01_norm_sq(g) == doctest::Approx(analytic).epsilon(1e-2));

  std::mt19937_64 rng(11);
  for (int k = 0; k < 10; ++k) {
    const ControlProfile r = random_profile(*space, rng, 1.0);
    const auto [a, b] = oracle::inlet_integrals(r);
    CHECK(boundary_h01_norm_sq(r) == doctest::Approx(a + b).epsilon(1e-12));
  }

  ControlProfile bad = g;
  bad.gx.front() = 0.1;
  CHECK_THROWS_AS(boundary_h01_norm_sq(bad), InvariantError);
}

TEST_CASE("section traces") {
  const auto space = oracle::channel_space(4.0, 1.0, 8, 6, Stenosis{0.25, 2.0, 1.0});
  const Eigen::VectorXd u = interpolate_velocity(*space, [](const Point& p) -> Vec2 {
    return {4 * p.y * (1 - p.y), 0.0};
  });
  const SectionQuadrature inlet_side = section_quadrature(*space, 0.3);
  CHECK(inlet_side.length() == doctest::Approx(1.0).epsilon(1e-13));
  const TraceProfile t = trace_on_section(*space, u, inlet_side);
  CHECK(t.l2_norm * t.l2_norm == doctest::Approx(8.0 / 15.0).epsilon(1e-12));

  // grid column at the narrowest point
  const SectionQuadrature mid = section_quadrature(*space, 2.0);
  CHECK(mid.length() == doctest::Approx(0.75).epsilon(1e-13));
  CHECK_THROWS_AS(section_quadrature(*space, -0.5), ParameterError);
  CHECK_THROWS_AS(section_quadrature(*space, 4.5), ParameterError);
}

TEST_CASE("control profile invariants") {
  const auto space = oracle::channel_space(2.0, 1.0, 4, 4);
  ControlProfile g = make_profile(*space, ProfileKind::Parabolic, 2.0);
  CHECK_NOTHROW(g.check_against(*space));
  CHECK(g.gx[4] == doctest::Approx(2.0));
  const Eigen::VectorXd c = g.interior();
  CHECK(c.size() == static_cast<Eigen::Index>(g.interior_size()));
  ControlProfile h = ControlProfile::zero(*space);
  h.set_interior(c);
  CHECK(h.gx == g.gx);
  CHECK((g + g.scaled(-1.0)).interior().norm() == 0.0);

  ControlProfile wrong = g;
  wrong.gy.back() = 1e-3;
  CHECK_THROWS_AS(wrong.check(), InvariantError);
  ControlProfile unsorted = g;
  std::swap(unsorted.s[1], unsorted.s[2]);
  CHECK_THROWS_AS(unsorted.check(), InvariantError);
  const auto other = oracle::channel_space(2.0, 1.0, 4, 5);
  CHECK_THROWS_AS(g.check_against(*other), InvariantError);

  FlowField field(space);
  CHECK_NOTHROW(field.check());
  field.p.resize(3);
  CHECK_THROWS_AS(field.check(), InvariantError);
}

}  // TEST_SUITE
