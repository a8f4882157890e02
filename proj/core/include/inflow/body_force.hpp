#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "inflow/fem_space.hpp"

namespace inflow {

/// A vector field known through its values at the degree-5 quadrature points
/// of every element. Analytic forces and convective products u.grad(u) share
/// this representation, so loads and L^{3/2} norms use one rule.
class BodyForce {
 public:
  BodyForce() = default;
  explicit BodyForce(std::shared_ptr<const FESpace> space);

  static BodyForce from_function(std::shared_ptr<const FESpace> space,
                                 const std::function<Vec2(const Point&)>& fn);
  /// (u . grad) u evaluated from the P2 velocity coefficients.
  static BodyForce convective(std::shared_ptr<const FESpace> space, const Eigen::VectorXd& u);

  const FESpace& space() const { return *space_; }
  const std::shared_ptr<const FESpace>& space_ptr() const { return space_; }
  std::size_t points_per_element() const;

  const Vec2& at(std::size_t element, std::size_t q) const { return values_[element * points_per_element() + q]; }
  Vec2& at(std::size_t element, std::size_t q) { return values_[element * points_per_element() + q]; }
  const std::vector<Vec2>& values() const { return values_; }

  BodyForce& operator+=(const BodyForce& other);
  BodyForce& operator-=(const BodyForce& other);
  BodyForce& operator*=(double factor);

  /// (int |h|^{3/2} dx)^{2/3}
  double l32_norm() const;
  double l2_norm() const;

 private:
  std::shared_ptr<const FESpace> space_;
  std::vector<Vec2> values_;
};

BodyForce operator+(BodyForce a, const BodyForce& b);
BodyForce operator-(BodyForce a, const BodyForce& b);
BodyForce operator*(double factor, BodyForce a);

}  // namespace inflow
