#include "inflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "inflow/errors.hpp"
#include "line_reader.hpp"

namespace inflow {

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::In:
      return "in";
    case BoundaryTag::Wall:
      return "wall";
    case BoundaryTag::Out:
      return "out";
  }
  return "wall";
}

std::optional<BoundaryTag> parse_boundary_tag(std::string_view text) {
  if (text == "in") return BoundaryTag::In;
  if (text == "wall") return BoundaryTag::Wall;
  if (text == "out") return BoundaryTag::Out;
  return std::nullopt;
}

double Mesh::signed_area(std::size_t tri) const {
  const auto& t = triangles[tri];
  const Point& a = nodes[t[0]];
  const Point& b = nodes[t[1]];
  const Point& c = nodes[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh::area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += signed_area(t);
  return sum;
}

std::size_t Mesh::count_tag(BoundaryTag tag) const {
  return static_cast<std::size_t>(std::count_if(
      boundary.begin(), boundary.end(), [tag](const BoundaryEdge& e) { return e.tag == tag; }));
}

double channel_height(double height, const std::optional<Stenosis>& stenosis, double x) {
  if (!stenosis) return height;
  const double d = x - stenosis->center;
  if (std::abs(d) >= stenosis->width) return height;
  return height - stenosis->amplitude * 0.5 * (1.0 + std::cos(std::numbers::pi * d / stenosis->width));
}

Mesh build_channel_mesh(const ChannelParams& p) {
  if (!(p.length > 0.0) || !(p.height > 0.0) || !std::isfinite(p.length) ||
      !std::isfinite(p.height)) {
    throw ParameterError("channel length and height must be positive and finite");
  }
  if (p.nx < 1 || p.ny < 1) throw ParameterError("nx and ny must be at least 1");
  if (p.stenosis) {
    if (!(p.stenosis->width > 0.0)) throw ParameterError("stenosis width must be positive");
    if (p.stenosis->amplitude < 0.0) throw ParameterError("stenosis amplitude must be non-negative");
    if (p.stenosis->amplitude >= 0.5 * p.height) {
      throw DegenerateDomainError("stenosis amplitude must be below half the channel height");
    }
  }

  Mesh mesh;
  mesh.stenosis = p.stenosis;
  const std::size_t nx = p.nx;
  const std::size_t ny = p.ny;
  const auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };

  mesh.nodes.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    for (std::size_t i = 0; i <= nx; ++i) {
      const double x = p.length * static_cast<double>(i) / static_cast<double>(nx);
      const double h = channel_height(p.height, p.stenosis, x);
      mesh.nodes.push_back({x, h * static_cast<double>(j) / static_cast<double>(ny)});
    }
  }

  mesh.triangles.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t n00 = id(i, j), n10 = id(i + 1, j);
      const std::size_t n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
      mesh.triangles.push_back({n00, n10, n11});
      mesh.triangles.push_back({n00, n11, n01});
    }
  }

  // Counterclockwise loop: bottom, outlet, top, inlet.
  for (std::size_t i = 0; i < nx; ++i) mesh.boundary.push_back({id(i, 0), id(i + 1, 0), BoundaryTag::Wall});
  for (std::size_t j = 0; j < ny; ++j) mesh.boundary.push_back({id(nx, j), id(nx, j + 1), BoundaryTag::Out});
  for (std::size_t i = nx; i > 0; --i) mesh.boundary.push_back({id(i, ny), id(i - 1, ny), BoundaryTag::Wall});
  for (std::size_t j = ny; j > 0; --j) mesh.boundary.push_back({id(0, j), id(0, j - 1), BoundaryTag::In});
  return mesh;
}

std::vector<std::array<std::size_t, 2>> mesh_edges(const Mesh& mesh) {
  std::vector<std::array<std::size_t, 2>> edges;
  edges.reserve(3 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      std::size_t a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      if (a > b) std::swap(a, b);
      edges.push_back({a, b});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

namespace {

using EdgeKey = std::pair<std::size_t, std::size_t>;

EdgeKey key(std::size_t a, std::size_t b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::string edge_name(std::size_t a, std::size_t b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

std::vector<MeshFinding> validate_mesh(const Mesh& mesh) {
  std::vector<MeshFinding> findings;
  const auto add = [&findings](std::string kind, std::string msg) {
    findings.push_back({std::move(kind), std::move(msg)});
  };

  const std::size_t n = mesh.nodes.size();
  if (mesh.triangles.empty()) add("empty mesh", "mesh has no triangles");

  bool indices_ok = true;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    if (tri[0] >= n || tri[1] >= n || tri[2] >= n) {
      add("node index out of range", "triangle " + std::to_string(t) + " references a missing node");
      indices_ok = false;
    }
  }
  for (std::size_t e = 0; e < mesh.boundary.size(); ++e) {
    if (mesh.boundary[e].a >= n || mesh.boundary[e].b >= n) {
      add("node index out of range", "boundary edge " + std::to_string(e) + " references a missing node");
      indices_ok = false;
    }
  }
  if (!indices_ok) return findings;

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!(mesh.signed_area(t) > 0.0)) {
      add("negative area", "triangle " + std::to_string(t) + " has non-positive signed area " +
                               std::to_string(mesh.signed_area(t)));
    }
  }

  std::map<EdgeKey, int> edge_use;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) ++edge_use[key(t[(k + 1) % 3], t[(k + 2) % 3])];
  }
  for (const auto& [e, count] : edge_use) {
    if (count > 2) add("non-manifold edge", "edge " + edge_name(e.first, e.second) + " shared by " +
                                                std::to_string(count) + " triangles");
  }

  std::map<EdgeKey, int> tagged;
  for (const auto& be : mesh.boundary) ++tagged[key(be.a, be.b)];
  for (const auto& [e, count] : tagged) {
    if (count > 1) add("duplicate boundary edge", "edge " + edge_name(e.first, e.second) + " tagged " +
                                                      std::to_string(count) + " times");
    const auto it = edge_use.find(e);
    if (it == edge_use.end() || it->second != 1) {
      add("tagged interior edge",
          "edge " + edge_name(e.first, e.second) + " is not a boundary edge of exactly one triangle");
    }
  }
  for (const auto& [e, count] : edge_use) {
    if (count == 1 && !tagged.contains(e)) {
      add("untagged boundary edge", "edge " + edge_name(e.first, e.second) + " has no boundary tag");
    }
  }

  // Closed loops: every boundary vertex touches exactly two tagged edges.
  std::map<std::size_t, int> degree;
  for (const auto& be : mesh.boundary) {
    ++degree[be.a];
    ++degree[be.b];
  }
  for (const auto& [v, d] : degree) {
    if (d != 2) add("open boundary loop", "boundary node " + std::to_string(v) + " has " +
                                              std::to_string(d) + " boundary edges");
  }

  const long long euler = static_cast<long long>(n) - static_cast<long long>(edge_use.size()) +
                          static_cast<long long>(mesh.triangles.size());
  if (euler != 1) add("euler characteristic", "nodes - edges + triangles = " + std::to_string(euler));

  if (n > 0) {
    double xmin = mesh.nodes[0].x, xmax = mesh.nodes[0].x;
    for (const auto& p : mesh.nodes) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
    }
    const double tol = 1e-12 * std::max(1.0, xmax - xmin);
    for (const auto& be : mesh.boundary) {
      const Point& a = mesh.nodes[be.a];
      const Point& b = mesh.nodes[be.b];
      const bool on_left = std::abs(a.x - xmin) <= tol && std::abs(b.x - xmin) <= tol;
      const bool on_right = std::abs(a.x - xmax) <= tol && std::abs(b.x - xmax) <= tol;
      const bool ok = (be.tag == BoundaryTag::In && on_left) ||
                      (be.tag == BoundaryTag::Out && on_right) ||
                      (be.tag == BoundaryTag::Wall && !on_left && !on_right);
      if (!ok) {
        add("misplaced tag", "edge " + edge_name(be.a, be.b) + " tagged " +
                                 std::string(to_string(be.tag)) + " lies on the wrong boundary part");
      }
    }
  }
  if (mesh.count_tag(BoundaryTag::In) == 0) add("missing inlet", "no edge tagged in");
  return findings;
}

void require_valid(const Mesh& mesh) {
  const auto findings = validate_mesh(mesh);
  if (findings.empty()) return;
  std::string msg = "invalid mesh:";
  for (const auto& f : findings) msg += " [" + f.kind + "] " + f.message + ";";
  throw InvariantError(msg);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  char buf[96];
  out << "mesh 1\n";
  out << "nodes " << mesh.nodes.size() << '\n';
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    out << buf;
  }
  out << "triangles " << mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "boundary " << mesh.boundary.size() << '\n';
  for (const auto& e : mesh.boundary) out << e.a << ' ' << e.b << ' ' << to_string(e.tag) << '\n';
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_mesh(mesh, out);
  if (!out) throw IoError("write failed for " + path.string());
}

using detail::LineReader;
using detail::expect_end;
using detail::read_header;
using detail::read_index;

Mesh read_mesh(std::istream& in) {
  LineReader reader(in);
  std::istringstream tokens;
  if (!reader.next(tokens)) throw ParseError("empty mesh file", 1);
  std::string magic;
  int version = 0;
  if (!(tokens >> magic >> version) || magic != "mesh") throw ParseError("expected 'mesh 1' header", reader.line());
  if (version != 1) throw ParseError("unsupported mesh format version " + std::to_string(version), reader.line());
  expect_end(tokens, reader.line());

  Mesh mesh;
  const std::size_t n = read_header(reader, tokens, "nodes");
  mesh.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!reader.next(tokens)) throw ParseError("unexpected end of file in node block", reader.line() + 1);
    std::string sx, sy;
    if (!(tokens >> sx >> sy)) throw ParseError("expected 'x y'", reader.line());
    Point p;
    try {
      std::size_t ux = 0, uy = 0;
      p.x = std::stod(sx, &ux);
      p.y = std::stod(sy, &uy);
      if (ux != sx.size() || uy != sy.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("non-numeric coordinate", reader.line());
    }
    expect_end(tokens, reader.line());
    mesh.nodes.push_back(p);
  }

  const std::size_t t = read_header(reader, tokens, "triangles");
  mesh.triangles.reserve(t);
  for (std::size_t i = 0; i < t; ++i) {
    if (!reader.next(tokens)) throw ParseError("unexpected end of file in triangle block", reader.line() + 1);
    Triangle tri{};
    for (auto& v : tri) v = read_index(tokens, reader.line());
    expect_end(tokens, reader.line());
    mesh.triangles.push_back(tri);
  }

  const std::size_t b = read_header(reader, tokens, "boundary");
  mesh.boundary.reserve(b);
  for (std::size_t i = 0; i < b; ++i) {
    if (!reader.next(tokens)) throw ParseError("unexpected end of file in boundary block", reader.line() + 1);
    BoundaryEdge e;
    e.a = read_index(tokens, reader.line());
    e.b = read_index(tokens, reader.line());
    std::string tag;
    if (!(tokens >> tag)) throw ParseError("missing boundary tag", reader.line());
    const auto parsed = parse_boundary_tag(tag);
    if (!parsed) throw ParseError("unknown boundary tag '" + tag + "' (expected in, wall or out)", reader.line());
    e.tag = *parsed;
    expect_end(tokens, reader.line());
    mesh.boundary.push_back(e);
  }
  if (reader.next(tokens)) throw ParseError("unexpected content after boundary block", reader.line());
  return mesh;
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_mesh(in);
}

}  // namespace inflow
