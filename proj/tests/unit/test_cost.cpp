#include <doctest.h>

#include <cmath>
#include <random>

#include "inflow/cost.hpp"
#include "inflow/errors.hpp"
#include "inflow/norms.hpp"
#include "inflow/synthetic.hpp"
#include "support/oracles.hpp"

using namespace inflow;

namespace {

Vec2 z_fn(double x, double y) { return {1 + x * y, y * y - x}; }

Eigen::VectorXd z_field(const FESpace& s) {
  return interpolate_velocity(s, [](const Point& p) { return z_fn(p.x, p.y); });
}

Eigen::VectorXd random_field(const FESpace& s, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::VectorXd v(static_cast<Eigen::Index>(s.velocity_size()));
  for (auto& x : v) x = n(rng);
  return v;
}

/// Cost with zero data on `omega`, only the data term weighted.
CostFunctional zero_data_cost(const std::shared_ptr<const FESpace>& space, const OmegaPartSpec& omega) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->velocity_size()));
  return CostFunctional(space, CostConfig{1.0, 0.0, 0.0, omega}, sample_field(*space, zero, omega));
}

std::vector<OmegaPartSpec> variants(const FESpace& s) {
  return {OmegaPartSpec::full(), OmegaPartSpec::cross_sections({0.5, 1.25}),
          OmegaPartSpec::patches({elements_in_x_range(s, 0.0, 0.5), elements_in_x_range(s, 1.0, 1.5)})};
}

}  // namespace

TEST_SUITE("cost") {

TEST_CASE("data term against exact integrals") {
  const auto space = oracle::channel_space(2.0, 1.0, 8, 4);
  const Eigen::VectorXd z = z_field(*space);
  const auto sq = [](double x, double y) { return z_fn(x, y).squaredNorm(); };

  CHECK(zero_data_cost(space, OmegaPartSpec::full()).term1(z) ==
        doctest::Approx(oracle::integrate_rectangle(sq, 0, 2, 0, 1)).epsilon(1e-12));

  const auto patches = OmegaPartSpec::patches({elements_in_x_range(*space, 0.0, 0.5),
                                               elements_in_x_range(*space, 1.0, 1.5)});
  const double in_patches = oracle::integrate_rectangle(sq, 0, 0.5, 0, 1) + oracle::integrate_rectangle(sq, 1, 1.5, 0, 1);
  CHECK(zero_data_cost(space, patches).term1(z) == doctest::Approx(in_patches).epsilon(1e-12));

  // sections: int_0^1 |z(a, y)|^2 dy, one at a grid column and one inside a cell
  const auto [q, w] = oracle::gauss_legendre(10);
  double on_sections = 0.0;
  for (double a : {0.5, 1.3}) {
    for (std::size_t i = 0; i < q.size(); ++i) on_sections += w[i] * z_fn(a, q[i]).squaredNorm();
  }
  CHECK(zero_data_cost(space, OmegaPartSpec::cross_sections({0.5, 1.3})).term1(z) ==
        doctest::Approx(on_sections).epsilon(1e-12));
}

TEST_CASE("exact data gives a zero data term") {
  const auto space = oracle::channel_space(2.0, 1.0, 8, 4, Stenosis{0.2, 1.0, 0.5});
  std::mt19937_64 rng(1);
  const Eigen::VectorXd u = random_field(*space, rng);
  for (const auto& omega : variants(*space)) {
    const CostFunctional cost(space, CostConfig{1.0, 0.0, 0.0, omega}, sample_field(*space, u, omega));
    CHECK(std::abs(cost.term1(u)) < 1e-20 + 1e-14 * u.squaredNorm());
    CHECK(cost.term1(u + z_field(*space)) > 1e-3);
  }
}

TEST_CASE("control terms and weights") {
  const auto space = oracle::channel_space(2.0, 1.0, 8, 6);
  std::mt19937_64 rng(2);
  const ControlProfile g = random_profile(*space, rng, 1.0);
  const Eigen::VectorXd z = z_field(*space);
  const CostFunctional base = zero_data_cost(space, OmegaPartSpec::full());
  const CostFunctional cost = base.with_weights(2.0, 0.5, 0.25);
  const CostValue v = cost.evaluate(z, g);
  const auto [l2, grad] = oracle::inlet_integrals(g);
  CHECK(v.term2 == doctest::Approx(l2).epsilon(1e-12));
  CHECK(v.term3 == doctest::Approx(grad).epsilon(1e-12));
  CHECK(v.term1 == doctest::Approx(base.term1(z)).epsilon(1e-14));
  CHECK(v.J == doctest::Approx(2.0 * v.term1 + 0.5 * l2 + 0.25 * grad).epsilon(1e-13));
}

TEST_CASE("gradients match central differences") {
  const auto space = oracle::channel_space(2.0, 1.0, 6, 3);
  std::mt19937_64 rng(3);
  const Eigen::VectorXd u = random_field(*space, rng);
  const Eigen::VectorXd target = random_field(*space, rng);
  for (const auto& omega : variants(*space)) {
    const CostFunctional cost(space, CostConfig{1.5, 0.3, 0.7, omega}, sample_field(*space, target, omega));
    const Eigen::VectorXd d = random_field(*space, rng);
    const double eps = 1e-3;
    // the data term is quadratic: central differences are exact up to rounding
    const double fd = 1.5 * (cost.term1(u + eps * d) - cost.term1(u - eps * d)) / (2 * eps);
    CHECK(cost.state_gradient(u).dot(d) == doctest::Approx(fd).epsilon(1e-8));

    const ControlProfile g = random_profile(*space, rng, 1.0);
    ControlProfile dg = ControlProfile::zero(*space);
    Eigen::VectorXd dc = Eigen::VectorXd::Random(static_cast<Eigen::Index>(g.interior_size()));
    dg.set_interior(dc);
    const auto reg = [&](const ControlProfile& h) {
      const CostValue c = cost.evaluate(u, h);
      return 0.3 * c.term2 + 0.7 * c.term3;
    };
    const double fdg = (reg(g + dg.scaled(eps)) - reg(g + dg.scaled(-eps))) / (2 * eps);
    CHECK(cost.control_gradient(g).dot(dc) == doctest::Approx(fdg).epsilon(1e-8));
  }
}

TEST_CASE("midpoint convexity with the exact slack") {
  const auto space = oracle::channel_space(2.0, 1.0, 8, 4, Stenosis{0.25, 1.0, 0.6});
  std::mt19937_64 rng(4);
  const Eigen::VectorXd target = random_field(*space, rng);
  for (const auto& omega : variants(*space)) {
    const CostFunctional cost(space, CostConfig{1.0, 0.0, 0.0, omega}, sample_field(*space, target, omega));
    const CostFunctional zero = zero_data_cost(space, omega);
    for (int pair = 0; pair < 100; ++pair) {
      const Eigen::VectorXd a = random_field(*space, rng), b = random_field(*space, rng);
      const ConvexityResult r = midpoint_convexity_check(cost, a, b);
      CHECK(r.pass);
      // for ||P u - d||^2 the midpoint gap is ||P (a - b)||^2 / 4
      CHECK(r.slack == doctest::Approx(0.25 * zero.term1(a - b)).epsilon(1e-9));
    }
  }
}

TEST_CASE("continuity modulus under halving") {
  const auto space = oracle::channel_space(2.0, 1.0, 8, 4);
  std::mt19937_64 rng(5);
  const Eigen::VectorXd target = random_field(*space, rng);
  for (const auto& omega : variants(*space)) {
    const CostFunctional cost(space, CostConfig{1.0, 0.0, 0.0, omega}, sample_field(*space, target, omega));
    const Eigen::VectorXd u = random_field(*space, rng), d = random_field(*space, rng);
    const ContinuityTable t = continuity_modulus_check(cost, u, d, {0.1, 0.05, 0.025, 0.0125});
    REQUIRE(t.rows.size() == 4);
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
      CHECK(t.rows[k].delta_h1 == doctest::Approx(t.rows[k - 1].delta_h1 / 2).epsilon(1e-12));
      CHECK(t.rows[k].ratio == doctest::Approx(t.rows[k - 1].ratio).epsilon(0.2));
      CHECK(t.rows[k].ratio <= t.fitted_constant);
    }
  }
  const CostFunctional cost = zero_data_cost(space, OmegaPartSpec::full());
  const Eigen::VectorXd u = random_field(*space, rng);
  CHECK_THROWS_AS(continuity_modulus_check(cost, u, u, {0.1, 0.2}), ParameterError);
  CHECK_THROWS_AS(continuity_modulus_check(cost, u, u, {0.1, -0.1}), ParameterError);
}

TEST_CASE("section data only sees the section") {
  const auto space = oracle::channel_space(4.0, 1.0, 16, 4);
  const CostFunctional cost = zero_data_cost(space, OmegaPartSpec::cross_sections({1.1}));
  std::mt19937_64 rng(6);
  const Eigen::VectorXd u = random_field(*space, rng);
  Eigen::VectorXd far = u;
  std::normal_distribution<double> n;
  for (std::size_t s = 0; s < space->scalar_count(); ++s) {
    if (std::abs(space->scalar_points()[s].x - 1.1) > 0.3) {
      for (int c = 0; c < 2; ++c) far[static_cast<Eigen::Index>(space->velocity_dof(c, s))] += n(rng);
    }
  }
  CHECK(cost.term1(far) == doctest::Approx(cost.term1(u)).epsilon(1e-13));
}

TEST_CASE("subdomain terms add up and nest") {
  const auto space = oracle::channel_space(4.0, 1.0, 16, 4);
  const auto a = elements_in_x_range(*space, 0.0, 1.0), b = elements_in_x_range(*space, 2.0, 3.0);
  const auto wide = elements_in_x_range(*space, 0.0, 1.5);
  std::mt19937_64 rng(7);
  const Eigen::VectorXd u = random_field(*space, rng);
  const double ta = zero_data_cost(space, OmegaPartSpec::patches({a})).term1(u);
  const double tb = zero_data_cost(space, OmegaPartSpec::patches({b})).term1(u);
  const double tab = zero_data_cost(space, OmegaPartSpec::patches({a, b})).term1(u);
  CHECK(tab == doctest::Approx(ta + tb).epsilon(1e-12));
  CHECK(zero_data_cost(space, OmegaPartSpec::patches({wide})).term1(u) >= ta);
  CHECK(zero_data_cost(space, OmegaPartSpec::full()).term1(u) >= tab);
  const auto all = OmegaPartSpec::patches({elements_in_x_range(*space, 0.0, 4.0)});
  CHECK(zero_data_cost(space, all).term1(u) ==
        doctest::Approx(zero_data_cost(space, OmegaPartSpec::full()).term1(u)).epsilon(1e-12));
}

TEST_CASE("trace bound constant is stable under refinement") {
  // ||u(a, .)||^2_{L^2} <= C ||u||^2_{H^1} for a fixed smooth u
  std::vector<double> ratios;
  for (std::size_t n : {8u, 16u, 32u}) {
    const auto space = oracle::channel_space(2.0, 1.0, 2 * n, n);
    const Eigen::VectorXd u = interpolate_velocity(*space, [](const Point& p) -> Vec2 {
      return {std::sin(3 * p.x) * p.y * (1 - p.y), std::cos(2 * p.y) * p.x};
    });
    const double trace = trace_on_section(*space, u, 0.7).l2_norm;
    ratios.push_back(trace * trace / h1_norm_sq(*space, u));
  }
  for (double r : ratios) CHECK(r == doctest::Approx(ratios.back()).epsilon(0.2));
}

TEST_CASE("configuration errors") {
  const auto space = oracle::channel_space(2.0, 1.0, 8, 4);
  CHECK_THROWS_AS(OmegaPartSpec::cross_sections({0.5, 0.5}).check(*space), ParameterError);
  CHECK_THROWS_AS(OmegaPartSpec::cross_sections({1.0, 0.5}).check(*space), ParameterError);
  CHECK_THROWS_AS(OmegaPartSpec::cross_sections({2.5}).check(*space), ParameterError);
  CHECK_THROWS_AS(OmegaPartSpec::cross_sections({}).check(*space), ParameterError);
  CHECK_THROWS_AS(OmegaPartSpec::patches({{0, 1}, {1, 2}}).check(*space), ParameterError);
  CHECK_THROWS_AS(OmegaPartSpec::patches({{}}).check(*space), ParameterError);
  CHECK_THROWS_AS(OmegaPartSpec::patches({{100000}}).check(*space), ParameterError);

  CHECK_THROWS_AS(CostConfig({0.0, 0.0, 0.0, {}}).check(), ParameterError);
  CHECK_THROWS_AS(CostConfig({1.0, -1.0, 0.0, {}}).check(), ParameterError);

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->velocity_size()));
  const auto sections = OmegaPartSpec::cross_sections({0.5});
  CHECK_THROWS_AS(CostFunctional(space, CostConfig{1.0, 0.0, 0.0, OmegaPartSpec::full()},
                                 sample_field(*space, zero, sections)),
                  ParameterError);
  const auto other = oracle::channel_space(2.0, 1.0, 8, 5);
  const CostFunctional cost = zero_data_cost(space, OmegaPartSpec::full());
  CHECK_THROWS_AS(cost.term1(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(other->velocity_size()))),
                  InvariantError);
  CHECK(parse_omega_variant("sections") == OmegaVariant::Sections);
  CHECK_FALSE(parse_omega_variant("volume").has_value());
}

}  // TEST_SUITE
