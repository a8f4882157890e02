#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "inflow/assembly.hpp"
#include "inflow/fem_space.hpp"
#include "inflow/norms.hpp"

namespace inflow {

enum class OmegaVariant { Full, Sections, Subdomains };

std::string_view to_string(OmegaVariant v);
std::optional<OmegaVariant> parse_omega_variant(std::string_view text);

/// Where the velocity data is observed: the whole domain, vertical cross
/// sections x = a_i, or a family of disjoint element patches.
struct OmegaPartSpec {
  OmegaVariant variant = OmegaVariant::Full;
  std::vector<double> sections;
  std::vector<std::vector<std::size_t>> subdomains;

  static OmegaPartSpec full() { return {}; }
  static OmegaPartSpec cross_sections(std::vector<double> positions);
  static OmegaPartSpec patches(std::vector<std::vector<std::size_t>> element_sets);

  /// Throws ParameterError on duplicate or non-increasing sections, sections
  /// outside (0, L), empty, out-of-range or overlapping subdomains.
  void check(const FESpace& space) const;
  /// Union of the subdomain element sets, sorted.
  std::vector<std::size_t> subdomain_elements() const;
};

/// Elements whose centroid lies in [x0, x1).
std::vector<std::size_t> elements_in_x_range(const FESpace& space, double x0, double x1);

struct CostConfig {
  double beta1 = 1.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  OmegaPartSpec omega;

  void check() const;
};

struct NoiseInfo {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string generator = "mt19937_64";
};

/// Velocity samples along one section at its quadrature points.
struct SectionSamples {
  double a = 0.0;
  std::vector<double> y;
  std::vector<Vec2> value;
};

/// Observed data u_d. Full and Subdomains carry a nodal velocity vector on
/// the whole space (only entries on the observed elements matter); Sections
/// carry the sampled profiles.
struct MeasurementSet {
  OmegaPartSpec omega;
  Eigen::VectorXd ud;
  std::vector<SectionSamples> sections;
  std::optional<NoiseInfo> noise;
  std::optional<ControlProfile> truth;
};

struct CostValue {
  double J = 0.0;
  double term1 = 0.0;  // int_{Omega_part} |u - u_d|^2
  double term2 = 0.0;  // int_{inlet} |g|^2 ds
  double term3 = 0.0;  // int_{inlet} |dg/ds|^2 ds
};

/// J(u, g) = beta1 term1 + beta2 term2 + beta3 term3. Every term is an
/// exact quadratic form: a restricted P2 mass matrix for volume data, a
/// sampling operator with line-quadrature weights for sections, and the
/// inlet mass and stiffness matrices for g.
class CostFunctional {
 public:
  /// Throws ParameterError/InvariantError when the configuration or the
  /// data do not match each other or the space.
  CostFunctional(std::shared_ptr<const FESpace> space, CostConfig config, MeasurementSet data);

  const FESpace& space() const { return *space_; }
  const CostConfig& config() const { return config_; }
  const MeasurementSet& data() const { return data_; }
  const std::vector<SectionQuadrature>& section_rules() const { return sections_; }

  double term1(const Eigen::VectorXd& u) const;
  CostValue evaluate(const Eigen::VectorXd& u, const ControlProfile& g) const;
  CostValue evaluate(const FlowField& field, const ControlProfile& g) const { return evaluate(field.u, g); }

  /// d J / d u (velocity vector): beta1 * d term1 / d u.
  Eigen::VectorXd state_gradient(const Eigen::VectorXd& u) const;
  /// Partial derivative of beta2 term2 + beta3 term3 with respect to the
  /// interior control values (ControlProfile::interior() layout).
  Eigen::VectorXd control_gradient(const ControlProfile& g) const;

  /// Same functional with other weights; the data are shared.
  CostFunctional with_weights(double beta1, double beta2, double beta3) const;

 private:
  std::shared_ptr<const FESpace> space_;
  CostConfig config_;
  MeasurementSet data_;
  SparseMatrix mass_;               // Full / Subdomains
  std::vector<SectionQuadrature> sections_;
  SparseMatrix sampling_;           // Sections: rows (2 per point): x then y component
  Eigen::VectorXd sample_weights_;  // per row
  Eigen::VectorXd sample_data_;     // per row
  Eigen::MatrixXd inlet_mass_, inlet_stiffness_;
};

/// Measurement set holding the exact samples of a velocity field for the
/// given observation region (no noise).
MeasurementSet sample_field(const FESpace& space, const Eigen::VectorXd& u, const OmegaPartSpec& omega);

struct ConvexityResult {
  double lhs = 0.0;    // term1((u1 + u2) / 2)
  double rhs = 0.0;    // (term1(u1) + term1(u2)) / 2
  double slack = 0.0;  // rhs - lhs
  bool pass = false;   // slack >= -1e-12
};
ConvexityResult midpoint_convexity_check(const CostFunctional& cost, const Eigen::VectorXd& u1,
                                         const Eigen::VectorXd& u2);

struct ContinuityRow {
  double eps = 0.0;
  double delta_h1 = 0.0;  // ||eps * direction||_{H^1}
  double difference = 0.0;  // |term1(u + eps d) - term1(u)|
  double ratio = 0.0;       // difference / delta_h1 (0 when delta vanishes)
};
struct ContinuityTable {
  std::vector<ContinuityRow> rows;
  double fitted_constant = 0.0;  // max ratio
};
/// Requires strictly decreasing positive eps values.
ContinuityTable continuity_modulus_check(const CostFunctional& cost, const Eigen::VectorXd& u,
                                         const Eigen::VectorXd& direction, const std::vector<double>& eps);

}  // namespace inflow
