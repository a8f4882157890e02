#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace inflow {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

enum class BoundaryTag { In, Wall, Out };

std::string_view to_string(BoundaryTag tag);
std::optional<BoundaryTag> parse_boundary_tag(std::string_view text);

using Triangle = std::array<std::size_t, 3>;

struct BoundaryEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  BoundaryTag tag = BoundaryTag::Wall;
  friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

/// Smooth cosine narrowing of the top wall:
/// h(x) = H - amplitude * (1 + cos(pi (x - center) / width)) / 2 for |x - center| < width.
struct Stenosis {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;
  friend bool operator==(const Stenosis&, const Stenosis&) = default;
};

struct Mesh {
  std::vector<Point> nodes;
  std::vector<Triangle> triangles;  // counterclockwise
  std::vector<BoundaryEdge> boundary;
  std::optional<Stenosis> stenosis;  // generator metadata, not persisted

  double signed_area(std::size_t tri) const;
  double area() const;
  std::size_t count_tag(BoundaryTag tag) const;

  /// Geometric identity: coordinates, connectivity and tags.
  friend bool operator==(const Mesh& lhs, const Mesh& rhs) {
    return lhs.nodes == rhs.nodes && lhs.triangles == rhs.triangles &&
           lhs.boundary == rhs.boundary;
  }
};

struct ChannelParams {
  double length = 5.0;
  double height = 1.0;
  std::size_t nx = 10;
  std::size_t ny = 4;
  std::optional<Stenosis> stenosis;
};

/// Structured triangulation of [0,L]x[0,H]; every cell is split along its
/// lower-left to upper-right diagonal. Left side is In, right side Out,
/// top and bottom Wall. Node (i,j) has index j*(nx+1)+i.
Mesh build_channel_mesh(const ChannelParams& params);

/// Channel height at abscissa x for the given stenosis (H when none).
double channel_height(double height, const std::optional<Stenosis>& stenosis, double x);

/// Undirected edges of the triangulation, sorted lexicographically with a < b.
std::vector<std::array<std::size_t, 2>> mesh_edges(const Mesh& mesh);

struct MeshFinding {
  std::string kind;     // "negative area", "untagged boundary edge", ...
  std::string message;
};

/// Lists every violated mesh invariant; empty iff the mesh is valid.
std::vector<MeshFinding> validate_mesh(const Mesh& mesh);

/// Throws InvariantError summarizing the findings when the mesh is invalid.
void require_valid(const Mesh& mesh);

void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh load_mesh(const std::filesystem::path& path);
Mesh read_mesh(std::istream& in);

}  // namespace inflow
