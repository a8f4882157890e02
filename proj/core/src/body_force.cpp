#include "inflow/body_force.hpp"

#include <cmath>

#include "inflow/errors.hpp"
#include "inflow/quadrature.hpp"

namespace inflow {

BodyForce::BodyForce(std::shared_ptr<const FESpace> space)
    : space_(std::move(space)),
      values_(space_->element_count() * triangle_rule_deg5().weights.size(), Vec2::Zero()) {}

std::size_t BodyForce::points_per_element() const { return triangle_rule_deg5().weights.size(); }

BodyForce BodyForce::from_function(std::shared_ptr<const FESpace> space,
                                   const std::function<Vec2(const Point&)>& fn) {
  BodyForce f(std::move(space));
  const auto& rule = triangle_rule_deg5();
  for (std::size_t t = 0; t < f.space().element_count(); ++t) {
    const auto& geo = f.space().geometry(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      f.at(t, q) = fn(geo.map(rule.points[q][0], rule.points[q][1]));
    }
  }
  return f;
}

BodyForce BodyForce::convective(std::shared_ptr<const FESpace> space, const Eigen::VectorXd& u) {
  BodyForce f(std::move(space));
  if (static_cast<std::size_t>(u.size()) != f.space().velocity_size()) {
    throw InvariantError("velocity vector does not match the space");
  }
  const auto& rule = triangle_rule_deg5();
  for (std::size_t t = 0; t < f.space().element_count(); ++t) {
    const auto& geo = f.space().geometry(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto shape = p2_shape(geo, rule.points[q][0], rule.points[q][1]);
      const auto s = sample_velocity(f.space(), u, t, shape);
      f.at(t, q) = s.grad * s.value;
    }
  }
  return f;
}

namespace {

void require_same_space(const BodyForce& a, const BodyForce& b) {
  if (a.space_ptr() != b.space_ptr()) throw InvariantError("body forces live on different spaces");
}

}  // namespace

BodyForce& BodyForce::operator+=(const BodyForce& other) {
  require_same_space(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

BodyForce& BodyForce::operator-=(const BodyForce& other) {
  require_same_space(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

BodyForce& BodyForce::operator*=(double factor) {
  for (auto& v : values_) v *= factor;
  return *this;
}

double BodyForce::l32_norm() const {
  const auto& rule = triangle_rule_deg5();
  double sum = 0.0;
  for (std::size_t t = 0; t < space_->element_count(); ++t) {
    const double jac = 2.0 * space_->geometry(t).area;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      sum += rule.weights[q] * jac * std::pow(at(t, q).norm(), 1.5);
    }
  }
  return std::pow(sum, 2.0 / 3.0);
}

double BodyForce::l2_norm() const {
  const auto& rule = triangle_rule_deg5();
  double sum = 0.0;
  for (std::size_t t = 0; t < space_->element_count(); ++t) {
    const double jac = 2.0 * space_->geometry(t).area;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) sum += rule.weights[q] * jac * at(t, q).squaredNorm();
  }
  return std::sqrt(sum);
}

BodyForce operator+(BodyForce a, const BodyForce& b) { return a += b; }
BodyForce operator-(BodyForce a, const BodyForce& b) { return a -= b; }
BodyForce operator*(double factor, BodyForce a) { return a *= factor; }

}  // namespace inflow
