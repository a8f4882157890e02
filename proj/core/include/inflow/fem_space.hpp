#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "inflow/mesh.hpp"

namespace inflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;  // (i, j) = d u_i / d x_j

/// Affine map of one triangle and the constant gradients of its barycentric coordinates.
struct ElementGeometry {
  std::array<Point, 3> v;
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda;

  Point map(double xi, double eta) const {
    return {v[0].x + xi * (v[1].x - v[0].x) + eta * (v[2].x - v[0].x),
            v[0].y + xi * (v[1].y - v[0].y) + eta * (v[2].y - v[0].y)};
  }
};

/// Quadratic Lagrange shape functions at a reference point. Local order: three
/// vertices, then the midpoints of the edges opposite vertex 0, 1, 2.
struct P2Shape {
  std::array<double, 6> value;
  std::array<Vec2, 6> grad;
};

P2Shape p2_shape(const ElementGeometry& geo, double xi, double eta);
std::array<double, 3> p1_shape(double xi, double eta);

/// Taylor-Hood P2/P1 degree-of-freedom layout over a mesh.
///
/// Scalar P2 nodes are the mesh nodes followed by one midpoint per edge.
/// Velocity dofs are component-blocked: dof(c, s) = c * scalar_count() + s.
/// Pressure dofs are the mesh nodes. Corners shared by the inlet (or outlet)
/// and the wall belong to the wall set only.
class FESpace {
 public:
  explicit FESpace(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }

  std::size_t node_count() const { return mesh_->nodes.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t scalar_count() const { return node_count() + edge_count(); }
  std::size_t velocity_size() const { return 2 * scalar_count(); }
  std::size_t pressure_size() const { return node_count(); }
  std::size_t element_count() const { return mesh_->triangles.size(); }

  std::size_t velocity_dof(int component, std::size_t scalar) const {
    return static_cast<std::size_t>(component) * scalar_count() + scalar;
  }

  /// Scalar P2 node ids of element t in local shape order.
  const std::array<std::size_t, 6>& element_nodes(std::size_t t) const { return element_nodes_[t]; }
  const ElementGeometry& geometry(std::size_t t) const { return geometry_[t]; }
  const std::vector<Point>& scalar_points() const { return scalar_points_; }
  const std::vector<std::array<std::size_t, 2>>& edges() const { return edges_; }

  // Scalar node sets, sorted.
  const std::vector<std::size_t>& wall_nodes() const { return wall_nodes_; }
  const std::vector<std::size_t>& inlet_nodes() const { return inlet_nodes_; }
  const std::vector<std::size_t>& inlet_interior_nodes() const { return inlet_interior_nodes_; }
  const std::vector<std::size_t>& outlet_nodes() const { return outlet_nodes_; }

  // Velocity dof sets (both components), sorted.
  const std::vector<std::size_t>& wall_dofs() const { return wall_dofs_; }
  const std::vector<std::size_t>& inlet_dofs() const { return inlet_dofs_; }
  const std::vector<std::size_t>& inlet_interior_dofs() const { return inlet_interior_dofs_; }
  const std::vector<std::size_t>& outlet_dofs() const { return outlet_dofs_; }

  /// Inlet scalar nodes ordered along the inlet, endpoints included, and
  /// their arclength parameters. Consecutive triples (2k, 2k+1, 2k+2) form
  /// one inlet edge with its midpoint.
  const std::vector<std::size_t>& inlet_chain() const { return inlet_chain_; }
  const std::vector<double>& inlet_params() const { return inlet_params_; }

  /// Dirichlet velocity dofs (wall and inlet interior), sorted.
  const std::vector<std::size_t>& dirichlet_dofs() const { return dirichlet_dofs_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<std::array<std::size_t, 2>> edges_;
  std::vector<std::array<std::size_t, 6>> element_nodes_;
  std::vector<ElementGeometry> geometry_;
  std::vector<Point> scalar_points_;
  std::vector<std::size_t> wall_nodes_, inlet_nodes_, inlet_interior_nodes_, outlet_nodes_;
  std::vector<std::size_t> wall_dofs_, inlet_dofs_, inlet_interior_dofs_, outlet_dofs_;
  std::vector<std::size_t> inlet_chain_;
  std::vector<double> inlet_params_;
  std::vector<std::size_t> dirichlet_dofs_;
};

/// Validates the mesh, then builds the space.
std::shared_ptr<const FESpace> build_taylor_hood(std::shared_ptr<const Mesh> mesh);
std::shared_ptr<const FESpace> build_taylor_hood(Mesh mesh);

/// Velocity and pressure coefficients on a space.
struct FlowField {
  std::shared_ptr<const FESpace> space;
  Eigen::VectorXd u;
  Eigen::VectorXd p;

  FlowField() = default;
  explicit FlowField(std::shared_ptr<const FESpace> s)
      : space(std::move(s)),
        u(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->velocity_size()))),
        p(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->pressure_size()))) {}

  /// Throws InvariantError when vector sizes disagree with the space.
  void check() const;
};

/// Value and gradient of a velocity coefficient vector inside element t.
struct VelocitySample {
  Vec2 value = Vec2::Zero();
  Mat2 grad = Mat2::Zero();
};

VelocitySample sample_velocity(const FESpace& space, const Eigen::VectorXd& u, std::size_t t,
                               const P2Shape& shape);
double sample_pressure(const FESpace& space, const Eigen::VectorXd& p, std::size_t t, double xi,
                       double eta);

/// Nodal P2 interpolant of an analytic vector field.
Eigen::VectorXd interpolate_velocity(const FESpace& space,
                                     const std::function<Vec2(const Point&)>& fn);
Eigen::VectorXd interpolate_pressure(const FESpace& space,
                                     const std::function<double(const Point&)>& fn);

/// Inlet velocity g as nodal values along the inlet chain (endpoints included).
struct ControlProfile {
  std::vector<double> s;
  std::vector<double> gx;
  std::vector<double> gy;

  std::size_t size() const { return s.size(); }

  /// Zero profile on the inlet parameterization of a space.
  static ControlProfile zero(const FESpace& space);

  /// Throws InvariantError unless lengths agree, s is strictly increasing and
  /// both endpoint values are exactly zero.
  void check() const;
  /// As check(), and also that the parameters match the space's inlet chain.
  void check_against(const FESpace& space) const;

  /// Interior values (gx interior, then gy interior): the control vector.
  Eigen::VectorXd interior() const;
  void set_interior(const Eigen::VectorXd& c);
  std::size_t interior_size() const { return size() >= 2 ? 2 * (size() - 2) : 0; }

  ControlProfile scaled(double factor) const;
};

ControlProfile operator+(const ControlProfile& a, const ControlProfile& b);

}  // namespace inflow
