#include "inflow/fem_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "inflow/errors.hpp"

namespace inflow {

P2Shape p2_shape(const ElementGeometry& geo, double xi, double eta) {
  const std::array<double, 3> l{1.0 - xi - eta, xi, eta};
  const auto& g = geo.grad_lambda;
  P2Shape s;
  for (int k = 0; k < 3; ++k) {
    s.value[k] = l[k] * (2.0 * l[k] - 1.0);
    s.grad[k] = (4.0 * l[k] - 1.0) * g[k];
  }
  // Edge k joins vertices (k+1, k+2).
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    s.value[3 + k] = 4.0 * l[a] * l[b];
    s.grad[3 + k] = 4.0 * (l[a] * g[b] + l[b] * g[a]);
  }
  return s;
}

std::array<double, 3> p1_shape(double xi, double eta) { return {1.0 - xi - eta, xi, eta}; }

namespace {

std::size_t edge_index(const std::vector<std::array<std::size_t, 2>>& edges, std::size_t a,
                       std::size_t b) {
  const std::array<std::size_t, 2> key{std::min(a, b), std::max(a, b)};
  const auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key) throw InvariantError("edge not present in triangulation");
  return static_cast<std::size_t>(it - edges.begin());
}

std::vector<std::size_t> sorted(const std::set<std::size_t>& s) { return {s.begin(), s.end()}; }

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace

FESpace::FESpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const Mesh& m = *mesh_;
  const std::size_t n = m.nodes.size();
  edges_ = mesh_edges(m);

  scalar_points_ = m.nodes;
  for (const auto& e : edges_) {
    const Point& a = m.nodes[e[0]];
    const Point& b = m.nodes[e[1]];
    scalar_points_.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }

  element_nodes_.reserve(m.triangles.size());
  geometry_.reserve(m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    std::array<std::size_t, 6> dofs{tri[0], tri[1], tri[2], 0, 0, 0};
    for (int k = 0; k < 3; ++k) dofs[3 + k] = n + edge_index(edges_, tri[(k + 1) % 3], tri[(k + 2) % 3]);
    element_nodes_.push_back(dofs);

    ElementGeometry geo;
    for (int k = 0; k < 3; ++k) geo.v[k] = m.nodes[tri[k]];
    const double x10 = geo.v[1].x - geo.v[0].x, y10 = geo.v[1].y - geo.v[0].y;
    const double x20 = geo.v[2].x - geo.v[0].x, y20 = geo.v[2].y - geo.v[0].y;
    const double det = x10 * y20 - x20 * y10;
    geo.area = 0.5 * det;
    // Rows of the inverse Jacobian are the gradients of xi and eta.
    geo.grad_lambda[1] = Vec2(y20 / det, -x20 / det);
    geo.grad_lambda[2] = Vec2(-y10 / det, x10 / det);
    geo.grad_lambda[0] = -geo.grad_lambda[1] - geo.grad_lambda[2];
    geometry_.push_back(geo);
  }

  std::set<std::size_t> wall, inlet, outlet;
  std::map<std::size_t, std::vector<std::size_t>> inlet_adj;
  for (const auto& be : m.boundary) {
    const std::size_t mid = n + edge_index(edges_, be.a, be.b);
    auto& target = be.tag == BoundaryTag::Wall ? wall : (be.tag == BoundaryTag::In ? inlet : outlet);
    target.insert({be.a, be.b, mid});
    if (be.tag == BoundaryTag::In) {
      inlet_adj[be.a].push_back(be.b);
      inlet_adj[be.b].push_back(be.a);
    }
  }
  wall_nodes_ = sorted(wall);
  inlet_nodes_ = sorted(inlet);
  for (std::size_t s : inlet_nodes_) {
    if (!wall.contains(s)) inlet_interior_nodes_.push_back(s);
  }
  for (std::size_t s : sorted(outlet)) {
    if (!wall.contains(s)) outlet_nodes_.push_back(s);
  }

  const auto to_dofs = [this](const std::vector<std::size_t>& nodes) {
    std::vector<std::size_t> dofs;
    dofs.reserve(2 * nodes.size());
    for (int c = 0; c < 2; ++c) {
      for (std::size_t s : nodes) dofs.push_back(velocity_dof(c, s));
    }
    return dofs;
  };
  wall_dofs_ = to_dofs(wall_nodes_);
  inlet_dofs_ = to_dofs(inlet_nodes_);
  inlet_interior_dofs_ = to_dofs(inlet_interior_nodes_);
  outlet_dofs_ = to_dofs(outlet_nodes_);
  dirichlet_dofs_ = wall_dofs_;
  dirichlet_dofs_.insert(dirichlet_dofs_.end(), inlet_interior_dofs_.begin(), inlet_interior_dofs_.end());
  std::sort(dirichlet_dofs_.begin(), dirichlet_dofs_.end());

  // Walk the inlet from its lowest endpoint.
  if (!inlet_adj.empty()) {
    std::vector<std::size_t> ends;
    for (const auto& [v, nb] : inlet_adj) {
      if (nb.size() == 1) ends.push_back(v);
      if (nb.size() > 2) throw InvariantError("inlet boundary is not a simple chain");
    }
    if (ends.size() != 2) throw InvariantError("inlet boundary must be a single open chain");
    const auto lower = [&m](std::size_t a, std::size_t b) {
      const Point &pa = m.nodes[a], &pb = m.nodes[b];
      return pa.y < pb.y || (pa.y == pb.y && pa.x < pb.x);
    };
    std::size_t cur = lower(ends[0], ends[1]) ? ends[0] : ends[1];
    std::size_t prev = cur;
    double s = 0.0;
    inlet_chain_.push_back(cur);
    inlet_params_.push_back(0.0);
    for (std::size_t step = 0; step < inlet_adj.size() - 1; ++step) {
      const auto& nb = inlet_adj[cur];
      const std::size_t next = (nb[0] != prev || nb.size() == 1) ? nb[0] : nb[1];
      const double len = distance(m.nodes[cur], m.nodes[next]);
      inlet_chain_.push_back(n + edge_index(edges_, cur, next));
      inlet_params_.push_back(s + 0.5 * len);
      s += len;
      inlet_chain_.push_back(next);
      inlet_params_.push_back(s);
      prev = cur;
      cur = next;
    }
  }
}

std::shared_ptr<const FESpace> build_taylor_hood(std::shared_ptr<const Mesh> mesh) {
  require_valid(*mesh);
  return std::make_shared<const FESpace>(std::move(mesh));
}

std::shared_ptr<const FESpace> build_taylor_hood(Mesh mesh) {
  return build_taylor_hood(std::make_shared<const Mesh>(std::move(mesh)));
}

void FlowField::check() const {
  if (!space) throw InvariantError("flow field has no space");
  if (static_cast<std::size_t>(u.size()) != space->velocity_size() ||
      static_cast<std::size_t>(p.size()) != space->pressure_size()) {
    throw InvariantError("flow field vector sizes do not match its space");
  }
}

VelocitySample sample_velocity(const FESpace& space, const Eigen::VectorXd& u, std::size_t t,
                               const P2Shape& shape) {
  VelocitySample out;
  const auto& nodes = space.element_nodes(t);
  const std::size_t off = space.scalar_count();
  for (int k = 0; k < 6; ++k) {
    const double ux = u[static_cast<Eigen::Index>(nodes[k])];
    const double uy = u[static_cast<Eigen::Index>(off + nodes[k])];
    out.value[0] += ux * shape.value[k];
    out.value[1] += uy * shape.value[k];
    out.grad.row(0) += ux * shape.grad[k].transpose();
    out.grad.row(1) += uy * shape.grad[k].transpose();
  }
  return out;
}

double sample_pressure(const FESpace& space, const Eigen::VectorXd& p, std::size_t t, double xi,
                       double eta) {
  const auto l = p1_shape(xi, eta);
  const auto& nodes = space.element_nodes(t);
  double v = 0.0;
  for (int k = 0; k < 3; ++k) v += l[k] * p[static_cast<Eigen::Index>(nodes[k])];
  return v;
}

Eigen::VectorXd interpolate_velocity(const FESpace& space,
                                     const std::function<Vec2(const Point&)>& fn) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(space.velocity_size()));
  const auto& pts = space.scalar_points();
  for (std::size_t s = 0; s < pts.size(); ++s) {
    const Vec2 v = fn(pts[s]);
    u[static_cast<Eigen::Index>(space.velocity_dof(0, s))] = v[0];
    u[static_cast<Eigen::Index>(space.velocity_dof(1, s))] = v[1];
  }
  return u;
}

Eigen::VectorXd interpolate_pressure(const FESpace& space,
                                     const std::function<double(const Point&)>& fn) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(space.pressure_size()));
  for (std::size_t i = 0; i < space.pressure_size(); ++i) p[static_cast<Eigen::Index>(i)] = fn(space.mesh().nodes[i]);
  return p;
}

ControlProfile ControlProfile::zero(const FESpace& space) {
  ControlProfile g;
  g.s = space.inlet_params();
  g.gx.assign(g.s.size(), 0.0);
  g.gy.assign(g.s.size(), 0.0);
  return g;
}

void ControlProfile::check() const {
  if (gx.size() != s.size() || gy.size() != s.size()) {
    throw InvariantError("control profile arrays have different lengths");
  }
  if (s.size() < 3 || s.size() % 2 == 0) {
    throw InvariantError("control profile needs an odd number (>= 3) of inlet parameters");
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) throw InvariantError("control profile parameters must be strictly increasing");
  }
  if (gx.front() != 0.0 || gy.front() != 0.0 || gx.back() != 0.0 || gy.back() != 0.0) {
    throw InvariantError("control profile must vanish at both inlet endpoints");
  }
}

void ControlProfile::check_against(const FESpace& space) const {
  check();
  const auto& ref = space.inlet_params();
  if (ref.size() != s.size()) throw InvariantError("control profile does not match the inlet of the space");
  const double scale = std::max(1.0, ref.back());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(ref[i] - s[i]) > 1e-12 * scale) {
      throw InvariantError("control profile parameters differ from the inlet parameterization");
    }
  }
}

Eigen::VectorXd ControlProfile::interior() const {
  const std::size_t m = size() >= 2 ? size() - 2 : 0;
  Eigen::VectorXd c(static_cast<Eigen::Index>(2 * m));
  for (std::size_t i = 0; i < m; ++i) {
    c[static_cast<Eigen::Index>(i)] = gx[i + 1];
    c[static_cast<Eigen::Index>(m + i)] = gy[i + 1];
  }
  return c;
}

void ControlProfile::set_interior(const Eigen::VectorXd& c) {
  const std::size_t m = size() >= 2 ? size() - 2 : 0;
  if (static_cast<std::size_t>(c.size()) != 2 * m) throw ParameterError("control vector has the wrong length");
  for (std::size_t i = 0; i < m; ++i) {
    gx[i + 1] = c[static_cast<Eigen::Index>(i)];
    gy[i + 1] = c[static_cast<Eigen::Index>(m + i)];
  }
}

ControlProfile ControlProfile::scaled(double factor) const {
  ControlProfile g = *this;
  for (auto& v : g.gx) v *= factor;
  for (auto& v : g.gy) v *= factor;
  return g;
}

ControlProfile operator+(const ControlProfile& a, const ControlProfile& b) {
  if (a.size() != b.size()) throw ParameterError("cannot add control profiles of different sizes");
  ControlProfile g = a;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.gx[i] += b.gx[i];
    g.gy[i] += b.gy[i];
  }
  return g;
}

}  // namespace inflow
