#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "inflow/assimilation.hpp"
#include "inflow/cost.hpp"
#include "inflow/mesh.hpp"
#include "inflow/navier_stokes.hpp"

namespace inflow {

/// Inlet profile description (see make_profile()).
struct ProfileSpec {
  std::string kind = "sine";
  double amplitude = 0.5;
  std::string components = "x";
};

/// Observation region as configured: section positions, or subdomains as
/// x-ranges [x0, x1) of element centroids.
struct OmegaConfig {
  OmegaVariant variant = OmegaVariant::Full;
  std::vector<double> sections;
  std::vector<std::pair<double, double>> subdomains;
};

struct ExperimentConfig {
  ChannelParams mesh{5.0, 1.0, 40, 8, Stenosis{0.3, 2.5, 1.0}};
  std::optional<std::filesystem::path> mesh_file;  // overrides the generator
  double viscosity = 0.1;
  Vec2 force = Vec2::Zero();                        // constant body force
  ProfileSpec inlet;                                // ground truth / forward-solve inlet
  double beta1 = 1.0, beta2 = 1e-6, beta3 = 1e-6;
  OmegaConfig omega;
  std::optional<std::filesystem::path> data_file;   // measurements; generated from `inlet` when absent
  double noise = 0.0;
  std::uint64_t seed = 1;
  std::optional<double> rho;                        // nullopt: derived from a contraction sweep
  PicardOptions picard;
  AssimilationOptions optimizer;
  ProfileSpec init{"zero", 0.0, "x"};
  std::vector<double> sweep_amplitudes{0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
  std::vector<double> sweep_viscosities{0.1, 0.05};
  std::size_t verify_cases = 30;
  std::size_t verify_gradient_cases = 5;
  std::vector<double> verify_fd_steps{1e-3, 1e-4, 1e-5};
};

/// Parses flat "key = value" lines; '#' starts a comment. Every key is
/// optional and falls back to the ExperimentConfig defaults. Unknown keys,
/// duplicate keys, malformed values and failed validation throw ParseError
/// naming the key and line (validation messages such as
/// "beta1 must be positive" are kept verbatim).
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its effective value, one per line, in a fixed order.
/// Feeding the echo back to parse_config() reproduces the configuration.
void write_config(const ExperimentConfig& config, std::ostream& out);

/// Resolves the configured observation region on a space.
OmegaPartSpec resolve_omega(const OmegaConfig& omega, const FESpace& space);

}  // namespace inflow
