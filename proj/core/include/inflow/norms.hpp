#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "inflow/fem_space.hpp"

namespace inflow {

/// int |u|^2 dx
double l2_norm_sq(const FESpace& space, const Eigen::VectorXd& u);
/// int |grad u|^2 dx
double h1_seminorm_sq(const FESpace& space, const Eigen::VectorXd& u);
/// int |u|^2 + |grad u|^2 dx, exact for P2 fields on affine triangles.
double h1_norm_sq(const FESpace& space, const Eigen::VectorXd& u);
/// int p^2 dx for a P1 pressure.
double pressure_l2_sq(const FESpace& space, const Eigen::VectorXd& p);

/// Mass and stiffness matrices of the quadratic interpolant along the inlet,
/// indexed like the profile parameters.
Eigen::MatrixXd inlet_mass_matrix(const std::vector<double>& s);
Eigen::MatrixXd inlet_stiffness_matrix(const std::vector<double>& s);

/// int_{inlet} |g|^2 ds
double boundary_l2_norm_sq(const ControlProfile& g);
/// int_{inlet} |d g / ds|^2 ds
double boundary_grad_norm_sq(const ControlProfile& g);
/// Squared H^1_0(inlet) norm: L^2 part plus tangential-derivative part.
/// Throws InvariantError when the profile does not vanish at the endpoints.
double boundary_h01_norm_sq(const ControlProfile& g);

/// (int |u . grad u|^{3/2} dx)^{2/3} with the degree-5 rule (approximate: the
/// integrand is not polynomial).
double l32_convective_norm(const FESpace& space, const Eigen::VectorXd& u);

/// L^2 norm of the pointwise divergence of u.
double divergence_l2(const FESpace& space, const Eigen::VectorXd& u);
/// max_k |(div u, q_k)| / ||q_k|| over the P1 pressure basis.
double weak_divergence_max(const FESpace& space, const Eigen::VectorXd& u);

/// One quadrature point on a vertical section x = a.
struct SectionPoint {
  std::size_t element = 0;
  double xi = 0.0;
  double eta = 0.0;
  double y = 0.0;
  double weight = 0.0;
};

/// Three-point Gauss rule on every piece of the section between consecutive
/// crossings with mesh edges; exact for |P2 trace|^2.
struct SectionQuadrature {
  double a = 0.0;
  std::vector<SectionPoint> points;
  double length() const;
};

/// Throws ParameterError unless the line x = a crosses the interior of the mesh.
SectionQuadrature section_quadrature(const FESpace& space, double a);

struct TraceProfile {
  std::vector<double> y;
  std::vector<Vec2> value;
  double l2_norm = 0.0;
};

TraceProfile trace_on_section(const FESpace& space, const Eigen::VectorXd& u,
                              const SectionQuadrature& section);
TraceProfile trace_on_section(const FESpace& space, const Eigen::VectorXd& u, double a);

}  // namespace inflow
