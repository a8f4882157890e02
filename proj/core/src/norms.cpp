#include "inflow/norms.hpp"

#include <algorithm>
#include <cmath>

#include "inflow/errors.hpp"
#include "inflow/quadrature.hpp"

namespace inflow {

namespace {

struct VolumeParts {
  double l2 = 0.0;
  double grad = 0.0;
};

VolumeParts volume_parts(const FESpace& space, const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(u.size()) != space.velocity_size()) {
    throw InvariantError("velocity vector does not match the space");
  }
  const auto& rule = triangle_rule_deg4();
  VolumeParts out;
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    const double jac = 2.0 * geo.area;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto s = sample_velocity(space, u, t, p2_shape(geo, rule.points[q][0], rule.points[q][1]));
      out.l2 += rule.weights[q] * jac * s.value.squaredNorm();
      out.grad += rule.weights[q] * jac * s.grad.squaredNorm();
    }
  }
  return out;
}

// Quadratic Lagrange basis on nodes (s0, s1, s2) and its derivative at s.
void lagrange3(const double* n, double s, double* val, double* der) {
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double den = (n[i] - n[j]) * (n[i] - n[k]);
    val[i] = (s - n[j]) * (s - n[k]) / den;
    der[i] = ((s - n[j]) + (s - n[k])) / den;
  }
}

Eigen::MatrixXd inlet_matrix(const std::vector<double>& s, bool stiffness) {
  const std::size_t n = s.size();
  if (n < 3 || n % 2 == 0) throw InvariantError("inlet parameterization needs an odd number (>= 3) of points");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto& rule = gauss3();
  for (std::size_t e = 0; e + 2 < n; e += 2) {
    const double len = s[e + 2] - s[e];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      double val[3], der[3];
      lagrange3(&s[e], s[e] + rule.points[q] * len, val, der);
      const double w = rule.weights[q] * len;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          m(static_cast<Eigen::Index>(e + i), static_cast<Eigen::Index>(e + j)) +=
              w * (stiffness ? der[i] * der[j] : val[i] * val[j]);
        }
      }
    }
  }
  return m;
}

double quadratic_form(const Eigen::MatrixXd& m, const std::vector<double>& v) {
  const Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
  return x.dot(m * x);
}

}  // namespace

double l2_norm_sq(const FESpace& space, const Eigen::VectorXd& u) { return volume_parts(space, u).l2; }

double h1_seminorm_sq(const FESpace& space, const Eigen::VectorXd& u) { return volume_parts(space, u).grad; }

double h1_norm_sq(const FESpace& space, const Eigen::VectorXd& u) {
  const auto parts = volume_parts(space, u);
  return parts.l2 + parts.grad;
}

double pressure_l2_sq(const FESpace& space, const Eigen::VectorXd& p) {
  const auto& rule = triangle_rule_deg4();
  double sum = 0.0;
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const double jac = 2.0 * space.geometry(t).area;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const double v = sample_pressure(space, p, t, rule.points[q][0], rule.points[q][1]);
      sum += rule.weights[q] * jac * v * v;
    }
  }
  return sum;
}

Eigen::MatrixXd inlet_mass_matrix(const std::vector<double>& s) { return inlet_matrix(s, false); }
Eigen::MatrixXd inlet_stiffness_matrix(const std::vector<double>& s) { return inlet_matrix(s, true); }

double boundary_l2_norm_sq(const ControlProfile& g) {
  g.check();
  const auto m = inlet_mass_matrix(g.s);
  return quadratic_form(m, g.gx) + quadratic_form(m, g.gy);
}

double boundary_grad_norm_sq(const ControlProfile& g) {
  g.check();
  const auto k = inlet_stiffness_matrix(g.s);
  return quadratic_form(k, g.gx) + quadratic_form(k, g.gy);
}

double boundary_h01_norm_sq(const ControlProfile& g) {
  return boundary_l2_norm_sq(g) + boundary_grad_norm_sq(g);
}

double l32_convective_norm(const FESpace& space, const Eigen::VectorXd& u) {
  const auto& rule = triangle_rule_deg5();
  double sum = 0.0;
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto s = sample_velocity(space, u, t, p2_shape(geo, rule.points[q][0], rule.points[q][1]));
      sum += rule.weights[q] * 2.0 * geo.area * std::pow((s.grad * s.value).norm(), 1.5);
    }
  }
  return std::pow(sum, 2.0 / 3.0);
}

double divergence_l2(const FESpace& space, const Eigen::VectorXd& u) {
  const auto& rule = triangle_rule_deg4();
  double sum = 0.0;
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto s = sample_velocity(space, u, t, p2_shape(geo, rule.points[q][0], rule.points[q][1]));
      const double div = s.grad.trace();
      sum += rule.weights[q] * 2.0 * geo.area * div * div;
    }
  }
  return std::sqrt(sum);
}

double weak_divergence_max(const FESpace& space, const Eigen::VectorXd& u) {
  const auto& rule = triangle_rule_deg4();
  std::vector<double> pairing(space.pressure_size(), 0.0);
  std::vector<double> mass(space.pressure_size(), 0.0);
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    const auto& nodes = space.element_nodes(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const double xi = rule.points[q][0], eta = rule.points[q][1];
      const auto s = sample_velocity(space, u, t, p2_shape(geo, xi, eta));
      const auto l = p1_shape(xi, eta);
      const double w = rule.weights[q] * 2.0 * geo.area;
      for (int k = 0; k < 3; ++k) {
        pairing[nodes[k]] += w * s.grad.trace() * l[k];
        mass[nodes[k]] += w * l[k] * l[k];
      }
    }
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < pairing.size(); ++k) {
    if (mass[k] > 0.0) worst = std::max(worst, std::abs(pairing[k]) / std::sqrt(mass[k]));
  }
  return worst;
}

double SectionQuadrature::length() const {
  double sum = 0.0;
  for (const auto& p : points) sum += p.weight;
  return sum;
}

namespace {

// Barycentric (xi, eta) of point (x, y) in element geo.
std::array<double, 2> reference_coords(const ElementGeometry& geo, double x, double y) {
  const Vec2 d(x - geo.v[0].x, y - geo.v[0].y);
  return {geo.grad_lambda[1].dot(d), geo.grad_lambda[2].dot(d)};
}

}  // namespace

SectionQuadrature section_quadrature(const FESpace& space, double a) {
  const Mesh& mesh = space.mesh();
  double xmin = mesh.nodes.front().x, xmax = xmin;
  for (const auto& p : mesh.nodes) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
  }
  if (!(a > xmin && a < xmax)) {
    throw ParameterError("section x = " + std::to_string(a) + " is not strictly inside the domain");
  }

  std::vector<double> cuts;
  for (const auto& e : space.edges()) {
    const Point& p = mesh.nodes[e[0]];
    const Point& q = mesh.nodes[e[1]];
    if (p.x == a && q.x == a) {
      cuts.push_back(p.y);
      cuts.push_back(q.y);
    } else if ((p.x - a) * (q.x - a) <= 0.0 && p.x != q.x) {
      const double t = (a - p.x) / (q.x - p.x);
      cuts.push_back(p.y + t * (q.y - p.y));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  const double span = cuts.back() - cuts.front();
  std::vector<double> unique_cuts;
  for (double c : cuts) {
    if (unique_cuts.empty() || c - unique_cuts.back() > 1e-12 * span) unique_cuts.push_back(c);
  }

  // Elements whose x-range contains a.
  std::vector<std::size_t> candidates;
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& v = space.geometry(t).v;
    const double lo = std::min({v[0].x, v[1].x, v[2].x});
    const double hi = std::max({v[0].x, v[1].x, v[2].x});
    if (lo <= a && a <= hi) candidates.push_back(t);
  }

  SectionQuadrature out;
  out.a = a;
  const auto& rule = gauss3();
  for (std::size_t i = 0; i + 1 < unique_cuts.size(); ++i) {
    const double y0 = unique_cuts[i], y1 = unique_cuts[i + 1];
    const double ym = 0.5 * (y0 + y1);
    std::size_t best = candidates.size();
    double best_score = -1.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto rc = reference_coords(space.geometry(candidates[c]), a, ym);
      const double score = std::min({rc[0], rc[1], 1.0 - rc[0] - rc[1]});
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    if (best == candidates.size() || best_score < -1e-10) {
      throw InvariantError("section crosses a region outside the mesh");
    }
    const std::size_t t = candidates[best];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double y = y0 + rule.points[q] * (y1 - y0);
      const auto rc = reference_coords(space.geometry(t), a, y);
      out.points.push_back({t, rc[0], rc[1], y, rule.weights[q] * (y1 - y0)});
    }
  }
  return out;
}

TraceProfile trace_on_section(const FESpace& space, const Eigen::VectorXd& u,
                              const SectionQuadrature& section) {
  TraceProfile out;
  double sum = 0.0;
  for (const auto& pt : section.points) {
    const auto s = sample_velocity(space, u, pt.element, p2_shape(space.geometry(pt.element), pt.xi, pt.eta));
    out.y.push_back(pt.y);
    out.value.push_back(s.value);
    sum += pt.weight * s.value.squaredNorm();
  }
  out.l2_norm = std::sqrt(sum);
  return out;
}

TraceProfile trace_on_section(const FESpace& space, const Eigen::VectorXd& u, double a) {
  return trace_on_section(space, u, section_quadrature(space, a));
}

}  // namespace inflow
