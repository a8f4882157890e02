#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "inflow/errors.hpp"
#include "inflow/mesh.hpp"

using namespace inflow;

namespace {

bool has_kind(const std::vector<MeshFinding>& findings, const std::string& kind) {
  return std::any_of(findings.begin(), findings.end(), [&](const MeshFinding& f) { return f.kind == kind; });
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("structured channel counts and area") {
  const Mesh m = build_channel_mesh({3.0, 1.5, 6, 4, {}});
  CHECK(m.nodes.size() == 7 * 5);
  CHECK(m.triangles.size() == 2 * 6 * 4);
  CHECK(m.boundary.size() == 2 * 6 + 2 * 4);
  CHECK(m.count_tag(BoundaryTag::In) == 4);
  CHECK(m.count_tag(BoundaryTag::Out) == 4);
  CHECK(m.count_tag(BoundaryTag::Wall) == 12);
  CHECK(m.area() == doctest::Approx(4.5).epsilon(1e-14));
  for (std::size_t t = 0; t < m.triangles.size(); ++t) CHECK(m.signed_area(t) > 0.0);
  CHECK(validate_mesh(m).empty());
}

TEST_CASE("stenosis removes amplitude times width of area") {
  // int a (1 + cos(pi (x - c) / w)) / 2 dx over |x - c| < w equals a w
  const Stenosis s{0.3, 2.5, 1.0};
  const Mesh coarse = build_channel_mesh({5.0, 1.0, 40, 4, s});
  const Mesh fine = build_channel_mesh({5.0, 1.0, 320, 4, s});
  const double exact = 5.0 - 0.3 * 1.0;
  // the trapezoid rule integrates a full cosine period exactly
  CHECK(fine.area() == doctest::Approx(exact).epsilon(1e-13));
  CHECK(coarse.area() == doctest::Approx(exact).epsilon(1e-13));
  const Mesh offset = build_channel_mesh({5.0, 1.0, 7, 4, Stenosis{0.3, 2.3, 1.1}});
  CHECK(std::abs(offset.area() - (5.0 - 0.3 * 1.1)) < 0.02);
  CHECK(validate_mesh(coarse).empty());
  CHECK(channel_height(1.0, s, 2.5) == doctest::Approx(0.7));
  CHECK(channel_height(1.0, s, 0.5) == 1.0);
}

TEST_CASE("generator rejects closing or invalid geometry") {
  CHECK_THROWS_AS(build_channel_mesh({5.0, 1.0, 10, 4, Stenosis{0.5, 2.5, 1.0}}), DegenerateDomainError);
  CHECK_THROWS_AS(build_channel_mesh({5.0, 1.0, 10, 4, Stenosis{0.9, 2.5, 1.0}}), DegenerateDomainError);
  CHECK_THROWS_AS(build_channel_mesh({-1.0, 1.0, 10, 4, {}}), ParameterError);
  CHECK_THROWS_AS(build_channel_mesh({5.0, 1.0, 0, 4, {}}), ParameterError);
  CHECK_THROWS_AS(build_channel_mesh({5.0, 1.0, 10, 4, Stenosis{0.1, 2.5, 0.0}}), ParameterError);
}

TEST_CASE("euler characteristic and edge count on random grids") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> n(1, 12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nx = n(rng), ny = n(rng);
    const Mesh m = build_channel_mesh({2.0, 1.0, nx, ny, Stenosis{0.2, 1.0, 0.5}});
    const auto edges = mesh_edges(m);
    // horizontal + vertical + diagonal
    CHECK(edges.size() == nx * (ny + 1) + (nx + 1) * ny + nx * ny);
    const long long chi = static_cast<long long>(m.nodes.size()) - static_cast<long long>(edges.size()) +
                          static_cast<long long>(m.triangles.size());
    CHECK(chi == 1);
    CHECK(validate_mesh(m).empty());
  }
}

TEST_CASE("validator reports each broken invariant") {
  const Mesh good = build_channel_mesh({2.0, 1.0, 4, 2, {}});

  Mesh flipped = good;
  std::swap(flipped.triangles[3][1], flipped.triangles[3][2]);
  CHECK(has_kind(validate_mesh(flipped), "negative area"));

  Mesh untagged = good;
  untagged.boundary.pop_back();
  CHECK(has_kind(validate_mesh(untagged), "untagged boundary edge"));

  Mesh duplicate = good;
  duplicate.boundary.push_back(duplicate.boundary.front());
  CHECK(has_kind(validate_mesh(duplicate), "duplicate boundary edge"));

  Mesh no_inlet = good;
  for (auto& e : no_inlet.boundary) {
    if (e.tag == BoundaryTag::In) e.tag = BoundaryTag::Wall;
  }
  const auto f = validate_mesh(no_inlet);
  CHECK(has_kind(f, "missing inlet"));
  CHECK(has_kind(f, "misplaced tag"));

  Mesh out_of_range = good;
  out_of_range.triangles[0][0] = 999;
  CHECK(has_kind(validate_mesh(out_of_range), "node index out of range"));

  Mesh interior = good;
  interior.boundary.push_back({good.triangles[0][0], good.triangles[0][2], BoundaryTag::Wall});
  CHECK(has_kind(validate_mesh(interior), "tagged interior edge"));

  CHECK(has_kind(validate_mesh(Mesh{}), "empty mesh"));
  CHECK_THROWS_AS(require_valid(flipped), InvariantError);
  CHECK_NOTHROW(require_valid(good));
}

TEST_CASE("text round trip is exact") {
  const Mesh m = build_channel_mesh({5.0, 1.0, 13, 5, Stenosis{0.37, 2.1, 0.9}});
  std::stringstream buf;
  write_mesh(m, buf);
  const Mesh back = read_mesh(buf);
  CHECK(back == m);
  std::stringstream again;
  write_mesh(back, again);
  std::stringstream first;
  write_mesh(m, first);
  CHECK(again.str() == first.str());
}

TEST_CASE("malformed mesh files report the line") {
  const auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_mesh(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("") == 1);
  CHECK(line_of("grid 1\n") == 1);
  CHECK(line_of("mesh 2\n") == 1);
  CHECK(line_of("mesh 1\nnodes 2\n0 0\n1 x\n") == 4);
  CHECK(line_of("mesh 1\nnodes 1\n0 0\ntriangles 1\n0 0\n") == 5);
  CHECK(line_of("mesh 1\nnodes 1\n0 0\ntriangles 0\nboundary 1\n0 0 side\n") == 6);
  CHECK(line_of("mesh 1\nnodes 1\n0 0\ntriangles 0\nboundary 0\nextra\n") == 6);
  CHECK(line_of("# header comment\nmesh 1\nnodes 1\n\n0 0 7\n") == 5);
}

TEST_CASE("boundary tags parse and print") {
  for (const auto tag : {BoundaryTag::In, BoundaryTag::Wall, BoundaryTag::Out}) {
    CHECK(parse_boundary_tag(to_string(tag)) == tag);
  }
  CHECK_FALSE(parse_boundary_tag("inlet").has_value());
}

}  // TEST_SUITE
