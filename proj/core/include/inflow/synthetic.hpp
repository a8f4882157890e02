#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "inflow/cost.hpp"
#include "inflow/navier_stokes.hpp"

namespace inflow {

enum class ProfileKind { Parabolic, Sine, Bump };
enum class ProfileComponents { X, Y, XY };

std::string_view to_string(ProfileKind kind);
std::string_view to_string(ProfileComponents components);
std::optional<ProfileKind> parse_profile_kind(std::string_view text);
std::optional<ProfileComponents> parse_profile_components(std::string_view text);

/// Endpoint-zero inlet profile in the normalized inlet coordinate t = s / H:
///   parabolic  a * 4 t (1 - t)
///   sine       a * sin(pi t)
///   bump       a * 16 t^2 (1 - t)^2
/// applied to the selected velocity components.
ControlProfile make_profile(const FESpace& space, ProfileKind kind, double amplitude,
                            ProfileComponents components = ProfileComponents::X);
/// As above; throws ParameterError for an unknown kind or component name.
ControlProfile make_profile(const FESpace& space, std::string_view kind, double amplitude,
                            std::string_view components = "x");

/// Solves Navier-Stokes at the ground truth, samples the velocity on the
/// observation region and adds independent N(0, sigma^2) noise to every
/// sampled value (nodal components for volume data, quadrature-point
/// components for sections), drawn from a mt19937_64 stream seeded with
/// `seed` in sampling order. Propagates DivergenceError.
MeasurementSet generate_measurements(const NavierStokesSolver& solver, const ControlProfile& truth,
                                     const BodyForce& f, const OmegaPartSpec& omega, double sigma,
                                     std::uint64_t seed, const PicardOptions& picard = {});

/// Noise step alone, applied in place to the sampled values of `data`.
void add_noise(MeasurementSet& data, const FESpace& space, double sigma, std::uint64_t seed);

/// Random smooth inlet profile: sin(k pi t) modes k = 1..modes in both
/// components with coefficients uniform in [-amplitude, amplitude] / k^2.
ControlProfile random_profile(const FESpace& space, std::mt19937_64& rng, double amplitude, int modes = 3);

/// Random smooth body force built from low trigonometric modes with
/// coefficients uniform in [-amplitude, amplitude].
BodyForce random_force(std::shared_ptr<const FESpace> space, std::mt19937_64& rng, double amplitude);

/// Random cases for the a-priori estimate checks: random_profile() and
/// random_force() with amplitudes drawn uniformly from [a / 2, a], so every
/// case carries both inlet and body-force data.
std::vector<StokesCase> random_stokes_cases(const std::shared_ptr<const FESpace>& space, std::mt19937_64& rng,
                                            std::size_t count, double g_amplitude, double h_amplitude);
std::vector<NsCase> random_ns_cases(const std::shared_ptr<const FESpace>& space, std::mt19937_64& rng,
                                    std::size_t count, double g_amplitude, double f_amplitude);

}  // namespace inflow
