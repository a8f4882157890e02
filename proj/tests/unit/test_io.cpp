#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "inflow/errors.hpp"
#include "inflow/io.hpp"
#include "inflow/stokes.hpp"
#include "inflow/synthetic.hpp"
#include "support/oracles.hpp"

using namespace inflow;

namespace {

std::string written(const MeasurementSet& m, const FESpace& space) {
  std::ostringstream out;
  write_measurements(m, space, out);
  return out.str();
}

std::size_t error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_measurements(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("measurement files round-trip exactly") {
  const auto space = oracle::channel_space(4.0, 1.0, 12, 4, Stenosis{0.3, 2.0, 1.0});
  const StokesSolver solver(space, 0.1);
  const ControlProfile truth = make_profile(*space, ProfileKind::Sine, 0.5, ProfileComponents::XY);
  const BodyForce f = BodyForce::from_function(space, [](const Point& p) -> Vec2 { return {p.y, 0.1}; });
  const Eigen::VectorXd u = solver.solve(truth, f).u;

  const auto patches = OmegaPartSpec::patches({elements_in_x_range(*space, 0.0, 1.0),
                                               elements_in_x_range(*space, 3.0, 4.0)});
  for (const auto& omega : {OmegaPartSpec::full(), OmegaPartSpec::cross_sections({0.7, 2.0}), patches}) {
    MeasurementSet m = sample_field(*space, u, omega);
    add_noise(m, *space, 0.01, 99);
    m.truth = truth;
    const std::string text = written(m, *space);
    std::istringstream in(text);
    const MeasurementSet back = read_measurements(in);
    CHECK(written(back, *space) == text);
    CHECK(back.omega.variant == omega.variant);
    REQUIRE(back.noise.has_value());
    CHECK(back.noise->seed == 99);
    REQUIRE(back.truth.has_value());
    CHECK(back.truth->gy == truth.gy);
    // identical data term on any state
    const CostFunctional a(space, CostConfig{1.0, 0.0, 0.0, omega}, m);
    const CostFunctional b(space, CostConfig{1.0, 0.0, 0.0, omega}, back);
    CHECK(a.term1(u) == b.term1(u));
    CHECK(a.term1(Eigen::VectorXd::Zero(u.size())) == b.term1(Eigen::VectorXd::Zero(u.size())));
  }
}

TEST_CASE("malformed measurement files report the line") {
  CHECK(error_line("") == 1);
  CHECK(error_line("measurements 2\n") == 1);
  CHECK(error_line("measurements 1\nvariant volume\n") == 2);
  CHECK(error_line("measurements 1\nvariant full\nnodes 2 5\n0 1 2\n1 1 2\n") == 3);
  CHECK(error_line("measurements 1\nvariant full\nnodes 2 2\n0 1 2\n0 1 2\n") == 5);
  CHECK(error_line("measurements 1\nvariant full\nnodes 1 1\n9 1 2\n") == 4);
  CHECK(error_line("measurements 1\nvariant full\nnodes 1 1\n0 1 2\ntrailing\n") == 5);
  CHECK(error_line("# comment\n\nmeasurements 1\nvariant full\nnoise 0.1\n") == 5);
  CHECK(error_line("measurements 1\nvariant full\ntruth 3\n0 0 0\n0.5 1 0\n1 0.5 0\n") >= 4);
}

TEST_CASE("files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "inflow_io_test";
  std::filesystem::create_directories(dir);
  const auto space = oracle::channel_space(2.0, 1.0, 4, 2);
  const MeasurementSet m = sample_field(*space, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(space->velocity_size())),
                                        OmegaPartSpec::full());
  save_measurements(m, *space, dir / "m.txt");
  CHECK(load_measurements(dir / "m.txt").ud == m.ud);
  CHECK_THROWS_AS(load_measurements(dir / "missing.txt"), IoError);
  CHECK_THROWS_AS(save_measurements(m, *space, dir / "no" / "such" / "m.txt"), IoError);
  save_mesh(space->mesh(), dir / "mesh.txt");
  CHECK(load_mesh(dir / "mesh.txt") == space->mesh());
  std::filesystem::remove_all(dir);
}

TEST_CASE("VTK output of Poiseuille flow") {
  const auto space = oracle::channel_space(5.0, 1.0, 10, 4);
  const FlowField u = solve_stokes(space, 0.1, make_profile(*space, ProfileKind::Parabolic, 1.0),
                                   BodyForce::from_function(space, [](const Point&) -> Vec2 { return Vec2::Zero(); }));
  std::ostringstream a, b;
  write_vtk(u, a);
  write_vtk(u, b);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string word;
  std::size_t points = 0, cells = 0;
  double max_ux = 0.0;
  bool quadratic = true;
  while (in >> word) {
    if (word == "POINTS") {
      in >> points >> word;
      for (std::size_t i = 0; i < 3 * points; ++i) in >> word;
    } else if (word == "CELL_TYPES") {
      in >> cells;
      for (std::size_t i = 0; i < cells; ++i) {
        int type = 0;
        in >> type;
        quadratic = quadratic && type == 22;
      }
    } else if (word == "VECTORS") {
      in >> word >> word;
      for (std::size_t i = 0; i < points; ++i) {
        double x = 0, y = 0, z = 0;
        in >> x >> y >> z;
        max_ux = std::max(max_ux, x);
      }
    }
  }
  CHECK(points == space->scalar_count());
  CHECK(cells == space->element_count());
  CHECK(quadratic);
  CHECK(max_ux == doctest::Approx(1.0).epsilon(1e-10));
}

}  // TEST_SUITE
