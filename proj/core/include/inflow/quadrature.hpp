#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace inflow {

/// Rule on the reference triangle {xi, eta >= 0, xi + eta <= 1}; weights sum to 1/2.
struct TriangleRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule on [0, 1]; weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

namespace detail {

inline void add_orbit3(TriangleRule& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  rule.points.push_back({a, a});
  rule.points.push_back({b, a});
  rule.points.push_back({a, b});
  for (int i = 0; i < 3; ++i) rule.weights.push_back(0.5 * w);
}

}  // namespace detail

/// Six-point rule, exact for polynomials of degree 4.
inline const TriangleRule& triangle_rule_deg4() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    r.degree = 4;
    detail::add_orbit3(r, 0.445948490915964886318329253883, 0.223381589678011465944819613939);
    detail::add_orbit3(r, 0.091576213509770743459571463402, 0.109951743655321867388513719394);
    return r;
  }();
  return rule;
}

/// Seven-point rule, exact for polynomials of degree 5.
inline const TriangleRule& triangle_rule_deg5() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    r.degree = 5;
    const double s15 = std::sqrt(15.0);
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.5 * 0.225);
    detail::add_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
    detail::add_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
    return r;
  }();
  return rule;
}

/// Three-point Gauss-Legendre, exact for degree 5.
inline const LineRule& gauss3() {
  static const LineRule rule = [] {
    LineRule r;
    r.degree = 5;
    const double d = 0.5 * std::sqrt(0.6);
    r.points = {0.5 - d, 0.5, 0.5 + d};
    r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    return r;
  }();
  return rule;
}

}  // namespace inflow
