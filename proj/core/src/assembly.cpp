#include "inflow/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "inflow/errors.hpp"
#include "inflow/quadrature.hpp"

namespace inflow {

namespace {

using Triplet = Eigen::Triplet<double>;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

SparseMatrix from_triplets(std::size_t rows, std::size_t cols, const std::vector<Triplet>& trips) {
  SparseMatrix m(idx(rows), idx(cols));
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

void require_velocity(const FESpace& space, const Eigen::VectorXd& w) {
  if (static_cast<std::size_t>(w.size()) != space.velocity_size()) {
    throw InvariantError("velocity vector does not belong to this space");
  }
}

}  // namespace

SaddleSystem assemble_stokes(const FESpace& space, double nu) {
  if (!(nu > 0.0)) throw ParameterError("viscosity must be positive");
  const auto& rule = triangle_rule_deg4();
  const std::size_t off = space.scalar_count();
  std::vector<Triplet> a_trips, b_trips;
  a_trips.reserve(space.element_count() * 72);
  b_trips.reserve(space.element_count() * 36);

  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    const auto& nodes = space.element_nodes(t);
    double ke[6][6] = {};
    double be[2][3][6] = {};
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const double xi = rule.points[q][0], eta = rule.points[q][1];
      const auto shape = p2_shape(geo, xi, eta);
      const auto l = p1_shape(xi, eta);
      const double w = rule.weights[q] * 2.0 * geo.area;
      for (int i = 0; i < 6; ++i) {
        for (int j = i; j < 6; ++j) ke[i][j] += w * shape.grad[i].dot(shape.grad[j]);
      }
      for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < 6; ++j) {
          be[0][k][j] -= w * l[k] * shape.grad[j][0];
          be[1][k][j] -= w * l[k] * shape.grad[j][1];
        }
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const double v = nu * (i <= j ? ke[i][j] : ke[j][i]);
        for (int c = 0; c < 2; ++c) a_trips.emplace_back(idx(c * off + nodes[i]), idx(c * off + nodes[j]), v);
      }
    }
    for (int c = 0; c < 2; ++c) {
      for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < 6; ++j) b_trips.emplace_back(idx(nodes[k]), idx(c * off + nodes[j]), be[c][k][j]);
      }
    }
  }

  SaddleSystem sys;
  sys.A = from_triplets(space.velocity_size(), space.velocity_size(), a_trips);
  sys.B = from_triplets(space.pressure_size(), space.velocity_size(), b_trips);
  sys.load = Eigen::VectorXd::Zero(idx(space.velocity_size()));
  sys.prescribed = Eigen::VectorXd::Zero(idx(space.velocity_size()));
  return sys;
}

SparseMatrix assemble_convection(const FESpace& space, const Eigen::VectorXd& w) {
  require_velocity(space, w);
  const auto& rule = triangle_rule_deg5();
  const std::size_t off = space.scalar_count();
  std::vector<Triplet> trips;
  trips.reserve(space.element_count() * 72);
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    const auto& nodes = space.element_nodes(t);
    double ne[6][6] = {};
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto shape = p2_shape(geo, rule.points[q][0], rule.points[q][1]);
      const Vec2 wq = sample_velocity(space, w, t, shape).value;
      const double wt = rule.weights[q] * 2.0 * geo.area;
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) ne[i][j] += wt * shape.value[i] * wq.dot(shape.grad[j]);
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        for (int c = 0; c < 2; ++c) trips.emplace_back(idx(c * off + nodes[i]), idx(c * off + nodes[j]), ne[i][j]);
      }
    }
  }
  return from_triplets(space.velocity_size(), space.velocity_size(), trips);
}

SparseMatrix assemble_convection_derivative(const FESpace& space, const Eigen::VectorXd& w) {
  require_velocity(space, w);
  const auto& rule = triangle_rule_deg5();
  const std::size_t off = space.scalar_count();
  std::vector<Triplet> trips;
  trips.reserve(space.element_count() * 144);
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    const auto& nodes = space.element_nodes(t);
    double me[2][2][6][6] = {};
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto shape = p2_shape(geo, rule.points[q][0], rule.points[q][1]);
      const Mat2 gw = sample_velocity(space, w, t, shape).grad;
      const double wt = rule.weights[q] * 2.0 * geo.area;
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) me[c][d][i][j] += wt * shape.value[i] * shape.value[j] * gw(c, d);
          }
        }
      }
    }
    for (int c = 0; c < 2; ++c) {
      for (int d = 0; d < 2; ++d) {
        for (int i = 0; i < 6; ++i) {
          for (int j = 0; j < 6; ++j) trips.emplace_back(idx(c * off + nodes[i]), idx(d * off + nodes[j]), me[c][d][i][j]);
        }
      }
    }
  }
  return from_triplets(space.velocity_size(), space.velocity_size(), trips);
}

Eigen::VectorXd assemble_load(const FESpace& space, const BodyForce& f) {
  if (&f.space() != &space) throw InvariantError("body force belongs to a different space");
  const auto& rule = triangle_rule_deg5();
  const std::size_t off = space.scalar_count();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(idx(space.velocity_size()));
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    const auto& nodes = space.element_nodes(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto shape = p2_shape(geo, rule.points[q][0], rule.points[q][1]);
      const double wt = rule.weights[q] * 2.0 * geo.area;
      const Vec2& fq = f.at(t, q);
      for (int i = 0; i < 6; ++i) {
        load[idx(nodes[i])] += wt * fq[0] * shape.value[i];
        load[idx(off + nodes[i])] += wt * fq[1] * shape.value[i];
      }
    }
  }
  return load;
}

SparseMatrix assemble_mass(const FESpace& space, const std::vector<std::size_t>& elements) {
  const auto& rule = triangle_rule_deg4();
  const std::size_t off = space.scalar_count();
  std::vector<std::size_t> list = elements;
  if (list.empty()) {
    list.resize(space.element_count());
    for (std::size_t t = 0; t < list.size(); ++t) list[t] = t;
  }
  std::vector<Triplet> trips;
  trips.reserve(list.size() * 72);
  for (std::size_t t : list) {
    if (t >= space.element_count()) throw ParameterError("element index out of range");
    const auto& geo = space.geometry(t);
    const auto& nodes = space.element_nodes(t);
    double me[6][6] = {};
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto shape = p2_shape(geo, rule.points[q][0], rule.points[q][1]);
      const double wt = rule.weights[q] * 2.0 * geo.area;
      for (int i = 0; i < 6; ++i) {
        for (int j = i; j < 6; ++j) me[i][j] += wt * shape.value[i] * shape.value[j];
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const double v = i <= j ? me[i][j] : me[j][i];
        for (int c = 0; c < 2; ++c) trips.emplace_back(idx(c * off + nodes[i]), idx(c * off + nodes[j]), v);
      }
    }
  }
  return from_triplets(space.velocity_size(), space.velocity_size(), trips);
}

Eigen::VectorXd inlet_lifting(const FESpace& space, const ControlProfile& g) {
  g.check_against(space);
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(idx(space.velocity_size()));
  const auto& chain = space.inlet_chain();
  // Endpoints are wall corners and stay zero.
  for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
    lift[idx(space.velocity_dof(0, chain[i]))] = g.gx[i];
    lift[idx(space.velocity_dof(1, chain[i]))] = g.gy[i];
  }
  return lift;
}

void apply_dirichlet(SaddleSystem& system, const FESpace& space, const ControlProfile& g) {
  if (system.velocity_size() != space.velocity_size()) throw InvariantError("system does not match the space");
  system.constrained = space.dirichlet_dofs();
  system.prescribed = inlet_lifting(space, g);
}

SparseMatrix saddle_matrix(const SaddleSystem& system, const SparseMatrix* extra) {
  const Eigen::Index nv = system.A.rows();
  const Eigen::Index np = system.B.rows();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(system.A.nonZeros() + 2 * system.B.nonZeros() +
                                         (extra ? extra->nonZeros() : 0)));
  const auto add_block = [&trips](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0, bool transpose) {
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        if (transpose) {
          trips.emplace_back(c0 + it.col(), r0 + it.row(), it.value());
        } else {
          trips.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
        }
      }
    }
  };
  add_block(system.A, 0, 0, false);
  if (extra) add_block(*extra, 0, 0, false);
  add_block(system.B, nv, 0, false);
  add_block(system.B, nv, 0, true);
  SparseMatrix k(nv + np, nv + np);
  k.setFromTriplets(trips.begin(), trips.end());
  k.makeCompressed();
  return k;
}

SparseMatrix eliminate_constraints(const SparseMatrix& full, const std::vector<std::size_t>& constrained) {
  std::vector<char> fixed(static_cast<std::size_t>(full.rows()), 0);
  for (std::size_t d : constrained) fixed[d] = 1;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (Eigen::Index k = 0; k < full.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(full, k); it; ++it) {
      if (fixed[static_cast<std::size_t>(it.row())] || fixed[static_cast<std::size_t>(it.col())]) continue;
      trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (std::size_t d : constrained) trips.emplace_back(idx(d), idx(d), 1.0);
  SparseMatrix k(full.rows(), full.cols());
  k.setFromTriplets(trips.begin(), trips.end());
  k.makeCompressed();
  return k;
}

Eigen::VectorXd constrained_rhs(const SparseMatrix& full, const std::vector<std::size_t>& constrained,
                                const Eigen::VectorXd& lift, const Eigen::VectorXd& load) {
  const Eigen::Index nv = lift.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(full.rows());
  x.head(nv) = lift;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(full.rows());
  rhs.head(nv) = load;
  rhs -= full * x;
  for (std::size_t d : constrained) rhs[idx(d)] = 0.0;
  return rhs;
}

std::vector<double> velocity_basis_h1_norms(const FESpace& space) {
  const auto& rule = triangle_rule_deg4();
  std::vector<double> sq(space.scalar_count(), 0.0);
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    const auto& nodes = space.element_nodes(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto shape = p2_shape(geo, rule.points[q][0], rule.points[q][1]);
      const double wt = rule.weights[q] * 2.0 * geo.area;
      for (int i = 0; i < 6; ++i) sq[nodes[i]] += wt * (shape.value[i] * shape.value[i] + shape.grad[i].squaredNorm());
    }
  }
  for (auto& v : sq) v = std::sqrt(v);
  return sq;
}

std::vector<double> pressure_basis_l2_norms(const FESpace& space) {
  const auto& rule = triangle_rule_deg4();
  std::vector<double> sq(space.pressure_size(), 0.0);
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& geo = space.geometry(t);
    const auto& nodes = space.element_nodes(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto l = p1_shape(rule.points[q][0], rule.points[q][1]);
      const double wt = rule.weights[q] * 2.0 * geo.area;
      for (int k = 0; k < 3; ++k) sq[nodes[k]] += wt * l[k] * l[k];
    }
  }
  for (auto& v : sq) v = std::sqrt(v);
  return sq;
}

}  // namespace inflow
