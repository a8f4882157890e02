#include "inflow/cost.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "inflow/errors.hpp"

namespace inflow {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::pair<double, double> x_extent(const Mesh& mesh) {
  double lo = mesh.nodes.front().x, hi = lo;
  for (const auto& p : mesh.nodes) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  return {lo, hi};
}

// Interior rows/columns of a dense inlet matrix, the same block for both components.
Eigen::VectorXd inlet_block_apply(const Eigen::MatrixXd& m, const ControlProfile& g) {
  const Eigen::Index n = idx(g.size());
  const Eigen::Map<const Eigen::VectorXd> gx(g.gx.data(), n), gy(g.gy.data(), n);
  const Eigen::VectorXd mx = m * gx, my = m * gy;
  const Eigen::Index ni = n - 2;
  Eigen::VectorXd out(2 * ni);
  out.head(ni) = mx.segment(1, ni);
  out.tail(ni) = my.segment(1, ni);
  return out;
}

double inlet_form(const Eigen::MatrixXd& m, const ControlProfile& g) {
  const Eigen::Index n = idx(g.size());
  const Eigen::Map<const Eigen::VectorXd> gx(g.gx.data(), n), gy(g.gy.data(), n);
  return gx.dot(m * gx) + gy.dot(m * gy);
}

}  // namespace

std::string_view to_string(OmegaVariant v) {
  switch (v) {
    case OmegaVariant::Full: return "full";
    case OmegaVariant::Sections: return "sections";
    case OmegaVariant::Subdomains: return "subdomains";
  }
  return "full";
}

std::optional<OmegaVariant> parse_omega_variant(std::string_view text) {
  if (text == "full") return OmegaVariant::Full;
  if (text == "sections") return OmegaVariant::Sections;
  if (text == "subdomains") return OmegaVariant::Subdomains;
  return std::nullopt;
}

OmegaPartSpec OmegaPartSpec::cross_sections(std::vector<double> positions) {
  OmegaPartSpec s;
  s.variant = OmegaVariant::Sections;
  s.sections = std::move(positions);
  return s;
}

OmegaPartSpec OmegaPartSpec::patches(std::vector<std::vector<std::size_t>> element_sets) {
  OmegaPartSpec s;
  s.variant = OmegaVariant::Subdomains;
  for (auto& set : element_sets) std::sort(set.begin(), set.end());
  s.subdomains = std::move(element_sets);
  return s;
}

void OmegaPartSpec::check(const FESpace& space) const {
  switch (variant) {
    case OmegaVariant::Full:
      return;
    case OmegaVariant::Sections: {
      if (sections.empty()) throw ParameterError("omega_part sections: at least one section is required");
      const auto [lo, hi] = x_extent(space.mesh());
      for (std::size_t i = 0; i < sections.size(); ++i) {
        const double a = sections[i];
        if (!(a > lo && a < hi)) {
          throw ParameterError("omega_part sections: x = " + std::to_string(a) + " is outside the channel");
        }
        if (i > 0 && sections[i] == sections[i - 1]) {
          throw ParameterError("omega_part sections: duplicate position " + std::to_string(a));
        }
        if (i > 0 && sections[i] < sections[i - 1]) {
          throw ParameterError("omega_part sections: positions must be strictly increasing");
        }
      }
      return;
    }
    case OmegaVariant::Subdomains: {
      if (subdomains.empty()) throw ParameterError("omega_part subdomains: at least one subdomain is required");
      std::set<std::size_t> seen;
      for (std::size_t k = 0; k < subdomains.size(); ++k) {
        if (subdomains[k].empty()) {
          throw ParameterError("omega_part subdomains: subdomain " + std::to_string(k) + " is empty");
        }
        for (std::size_t t : subdomains[k]) {
          if (t >= space.element_count()) {
            throw ParameterError("omega_part subdomains: element " + std::to_string(t) + " out of range");
          }
          if (!seen.insert(t).second) {
            throw ParameterError("omega_part subdomains: element " + std::to_string(t) +
                                 " belongs to more than one subdomain");
          }
        }
      }
      return;
    }
  }
}

std::vector<std::size_t> OmegaPartSpec::subdomain_elements() const {
  std::vector<std::size_t> all;
  for (const auto& s : subdomains) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<std::size_t> elements_in_x_range(const FESpace& space, double x0, double x1) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < space.element_count(); ++t) {
    const auto& v = space.geometry(t).v;
    const double cx = (v[0].x + v[1].x + v[2].x) / 3.0;
    if (cx >= x0 && cx < x1) out.push_back(t);
  }
  return out;
}

void CostConfig::check() const {
  if (!(beta1 > 0.0) || !std::isfinite(beta1)) throw ParameterError("beta1 must be positive");
  if (!(beta2 >= 0.0) || !std::isfinite(beta2)) throw ParameterError("beta2 must be nonnegative");
  if (!(beta3 >= 0.0) || !std::isfinite(beta3)) throw ParameterError("beta3 must be nonnegative");
}

CostFunctional::CostFunctional(std::shared_ptr<const FESpace> space, CostConfig config, MeasurementSet data)
    : space_(std::move(space)), config_(std::move(config)), data_(std::move(data)) {
  config_.check();
  config_.omega.check(*space_);
  const auto& omega = config_.omega;
  if (data_.omega.variant != omega.variant) {
    throw ParameterError("measurements are for variant '" + std::string(to_string(data_.omega.variant)) +
                         "' but the cost uses '" + std::string(to_string(omega.variant)) + "'");
  }

  if (omega.variant == OmegaVariant::Sections) {
    if (data_.sections.size() != omega.sections.size()) {
      throw ParameterError("measurements carry " + std::to_string(data_.sections.size()) +
                           " sections, the cost expects " + std::to_string(omega.sections.size()));
    }
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<double> weights, values;
    std::size_t row = 0;
    for (std::size_t i = 0; i < omega.sections.size(); ++i) {
      const auto& samples = data_.sections[i];
      if (samples.a != omega.sections[i]) {
        throw ParameterError("measurement section " + std::to_string(i) + " is at x = " +
                             std::to_string(samples.a) + ", expected " + std::to_string(omega.sections[i]));
      }
      sections_.push_back(section_quadrature(*space_, omega.sections[i]));
      const auto& rule = sections_.back();
      if (samples.y.size() != rule.points.size() || samples.value.size() != rule.points.size()) {
        throw ParameterError("measurement section " + std::to_string(i) + " has " +
                             std::to_string(samples.y.size()) + " samples, expected " +
                             std::to_string(rule.points.size()));
      }
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& pt = rule.points[q];
        if (std::abs(samples.y[q] - pt.y) > 1e-12 * (1.0 + std::abs(pt.y))) {
          throw ParameterError("measurement section " + std::to_string(i) + " sample " + std::to_string(q) +
                               " is not at a section quadrature point");
        }
        const auto shape = p2_shape(space_->geometry(pt.element), pt.xi, pt.eta);
        const auto& nodes = space_->element_nodes(pt.element);
        for (int c = 0; c < 2; ++c) {
          for (int a = 0; a < 6; ++a) {
            trips.emplace_back(idx(row), idx(space_->velocity_dof(c, nodes[a])), shape.value[a]);
          }
          weights.push_back(pt.weight);
          values.push_back(samples.value[q][c]);
          ++row;
        }
      }
    }
    sampling_.resize(idx(row), idx(space_->velocity_size()));
    sampling_.setFromTriplets(trips.begin(), trips.end());
    sample_weights_ = Eigen::Map<const Eigen::VectorXd>(weights.data(), idx(weights.size()));
    sample_data_ = Eigen::Map<const Eigen::VectorXd>(values.data(), idx(values.size()));
  } else {
    if (static_cast<std::size_t>(data_.ud.size()) != space_->velocity_size()) {
      throw ParameterError("measurement field has " + std::to_string(data_.ud.size()) +
                           " velocity values, the space has " + std::to_string(space_->velocity_size()));
    }
    if (omega.variant == OmegaVariant::Subdomains) {
      if (data_.omega.subdomains != omega.subdomains) {
        throw ParameterError("measurement subdomains differ from the configured subdomains");
      }
      mass_ = assemble_mass(*space_, omega.subdomain_elements());
    } else {
      mass_ = assemble_mass(*space_);
    }
  }
  inlet_mass_ = inlet_mass_matrix(space_->inlet_params());
  inlet_stiffness_ = inlet_stiffness_matrix(space_->inlet_params());
}

double CostFunctional::term1(const Eigen::VectorXd& u) const {
  if (static_cast<std::size_t>(u.size()) != space_->velocity_size()) {
    throw InvariantError("velocity vector does not match the cost's space");
  }
  if (config_.omega.variant == OmegaVariant::Sections) {
    const Eigen::VectorXd r = sampling_ * u - sample_data_;
    return r.dot(sample_weights_.cwiseProduct(r));
  }
  const Eigen::VectorXd r = u - data_.ud;
  return r.dot(mass_ * r);
}

CostValue CostFunctional::evaluate(const Eigen::VectorXd& u, const ControlProfile& g) const {
  g.check_against(*space_);
  CostValue v;
  v.term1 = term1(u);
  v.term2 = inlet_form(inlet_mass_, g);
  v.term3 = inlet_form(inlet_stiffness_, g);
  v.J = config_.beta1 * v.term1 + config_.beta2 * v.term2 + config_.beta3 * v.term3;
  return v;
}

Eigen::VectorXd CostFunctional::state_gradient(const Eigen::VectorXd& u) const {
  if (config_.omega.variant == OmegaVariant::Sections) {
    const Eigen::VectorXd r = sampling_ * u - sample_data_;
    return 2.0 * config_.beta1 * (sampling_.transpose() * sample_weights_.cwiseProduct(r));
  }
  return 2.0 * config_.beta1 * (mass_ * (u - data_.ud));
}

Eigen::VectorXd CostFunctional::control_gradient(const ControlProfile& g) const {
  g.check_against(*space_);
  return 2.0 * config_.beta2 * inlet_block_apply(inlet_mass_, g) +
         2.0 * config_.beta3 * inlet_block_apply(inlet_stiffness_, g);
}

CostFunctional CostFunctional::with_weights(double beta1, double beta2, double beta3) const {
  CostFunctional copy = *this;
  copy.config_.beta1 = beta1;
  copy.config_.beta2 = beta2;
  copy.config_.beta3 = beta3;
  copy.config_.check();
  return copy;
}

MeasurementSet sample_field(const FESpace& space, const Eigen::VectorXd& u, const OmegaPartSpec& omega) {
  omega.check(space);
  MeasurementSet m;
  m.omega = omega;
  if (omega.variant == OmegaVariant::Sections) {
    for (double a : omega.sections) {
      const auto rule = section_quadrature(space, a);
      const auto trace = trace_on_section(space, u, rule);
      m.sections.push_back({a, trace.y, trace.value});
    }
    return m;
  }
  if (omega.variant == OmegaVariant::Full) {
    m.ud = u;
    return m;
  }
  // Only values on observed elements are data; the rest stays zero.
  m.ud = Eigen::VectorXd::Zero(u.size());
  for (std::size_t t : omega.subdomain_elements()) {
    for (std::size_t s : space.element_nodes(t)) {
      for (int c = 0; c < 2; ++c) {
        const auto d = idx(space.velocity_dof(c, s));
        m.ud[d] = u[d];
      }
    }
  }
  return m;
}

ConvexityResult midpoint_convexity_check(const CostFunctional& cost, const Eigen::VectorXd& u1,
                                         const Eigen::VectorXd& u2) {
  ConvexityResult r;
  r.lhs = cost.term1(0.5 * (u1 + u2));
  r.rhs = 0.5 * cost.term1(u1) + 0.5 * cost.term1(u2);
  r.slack = r.rhs - r.lhs;
  r.pass = r.slack >= -1e-12;
  return r;
}

ContinuityTable continuity_modulus_check(const CostFunctional& cost, const Eigen::VectorXd& u,
                                         const Eigen::VectorXd& direction, const std::vector<double>& eps) {
  for (std::size_t j = 0; j < eps.size(); ++j) {
    if (!(eps[j] > 0.0)) throw ParameterError("perturbation sizes must be positive");
    if (j > 0 && !(eps[j] < eps[j - 1])) throw ParameterError("perturbation sizes must be strictly decreasing");
  }
  ContinuityTable table;
  const double base = cost.term1(u);
  const double dnorm = std::sqrt(h1_norm_sq(cost.space(), direction));
  for (double e : eps) {
    ContinuityRow row;
    row.eps = e;
    row.delta_h1 = e * dnorm;
    row.difference = std::abs(cost.term1(u + e * direction) - base);
    row.ratio = row.delta_h1 > 0.0 ? row.difference / row.delta_h1 : 0.0;
    table.fitted_constant = std::max(table.fitted_constant, row.ratio);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace inflow
