#include "inflow/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "inflow/errors.hpp"

namespace inflow {

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Parabolic: return "parabolic";
    case ProfileKind::Sine: return "sine";
    case ProfileKind::Bump: return "bump";
  }
  return "parabolic";
}

std::string_view to_string(ProfileComponents components) {
  switch (components) {
    case ProfileComponents::X: return "x";
    case ProfileComponents::Y: return "y";
    case ProfileComponents::XY: return "xy";
  }
  return "x";
}

std::optional<ProfileKind> parse_profile_kind(std::string_view text) {
  if (text == "parabolic") return ProfileKind::Parabolic;
  if (text == "sine") return ProfileKind::Sine;
  if (text == "bump") return ProfileKind::Bump;
  return std::nullopt;
}

std::optional<ProfileComponents> parse_profile_components(std::string_view text) {
  if (text == "x") return ProfileComponents::X;
  if (text == "y") return ProfileComponents::Y;
  if (text == "xy") return ProfileComponents::XY;
  return std::nullopt;
}

ControlProfile make_profile(const FESpace& space, ProfileKind kind, double amplitude,
                            ProfileComponents components) {
  if (!std::isfinite(amplitude)) throw ParameterError("profile amplitude must be finite");
  ControlProfile g = ControlProfile::zero(space);
  const double height = g.s.back();
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double t = g.s[i] / height;
    double v = 0.0;
    switch (kind) {
      case ProfileKind::Parabolic: v = 4.0 * t * (1.0 - t); break;
      case ProfileKind::Sine: v = std::sin(std::numbers::pi * t); break;
      case ProfileKind::Bump: v = 16.0 * t * t * (1.0 - t) * (1.0 - t); break;
    }
    v *= amplitude;
    if (components != ProfileComponents::Y) g.gx[i] = v;
    if (components != ProfileComponents::X) g.gy[i] = v;
  }
  return g;
}

ControlProfile make_profile(const FESpace& space, std::string_view kind, double amplitude,
                            std::string_view components) {
  const auto k = parse_profile_kind(kind);
  if (!k) throw ParameterError("unknown profile kind '" + std::string(kind) + "'");
  const auto c = parse_profile_components(components);
  if (!c) throw ParameterError("unknown profile components '" + std::string(components) + "'");
  return make_profile(space, *k, amplitude, *c);
}

void add_noise(MeasurementSet& data, const FESpace& space, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("noise sigma must be nonnegative");
  data.noise = NoiseInfo{sigma, seed, "mt19937_64"};
  if (sigma == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);

  switch (data.omega.variant) {
    case OmegaVariant::Sections:
      for (auto& sec : data.sections) {
        for (auto& v : sec.value) {
          v[0] += noise(rng);
          v[1] += noise(rng);
        }
      }
      return;
    case OmegaVariant::Full:
      for (std::size_t s = 0; s < space.scalar_count(); ++s) {
        for (int c = 0; c < 2; ++c) data.ud[static_cast<Eigen::Index>(space.velocity_dof(c, s))] += noise(rng);
      }
      return;
    case OmegaVariant::Subdomains: {
      std::set<std::size_t> nodes;
      for (std::size_t t : data.omega.subdomain_elements()) {
        for (std::size_t s : space.element_nodes(t)) nodes.insert(s);
      }
      for (std::size_t s : nodes) {
        for (int c = 0; c < 2; ++c) data.ud[static_cast<Eigen::Index>(space.velocity_dof(c, s))] += noise(rng);
      }
      return;
    }
  }
}

MeasurementSet generate_measurements(const NavierStokesSolver& solver, const ControlProfile& truth,
                                     const BodyForce& f, const OmegaPartSpec& omega, double sigma,
                                     std::uint64_t seed, const PicardOptions& picard) {
  const auto [u, report] = solver.solve(truth, f, picard);
  MeasurementSet data = sample_field(solver.space(), u.u, omega);
  add_noise(data, solver.space(), sigma, seed);
  data.truth = truth;
  return data;
}

ControlProfile random_profile(const FESpace& space, std::mt19937_64& rng, double amplitude, int modes) {
  std::uniform_real_distribution<double> coef(-amplitude, amplitude);
  std::vector<double> ax(static_cast<std::size_t>(modes)), ay(static_cast<std::size_t>(modes));
  for (int k = 0; k < modes; ++k) {
    const double decay = 1.0 / ((k + 1.0) * (k + 1.0));
    ax[static_cast<std::size_t>(k)] = decay * coef(rng);
    ay[static_cast<std::size_t>(k)] = decay * coef(rng);
  }
  ControlProfile g = ControlProfile::zero(space);
  const double height = g.s.back();
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double t = g.s[i] / height;
    for (int k = 0; k < modes; ++k) {
      const double mode = std::sin((k + 1) * std::numbers::pi * t);
      g.gx[i] += ax[static_cast<std::size_t>(k)] * mode;
      g.gy[i] += ay[static_cast<std::size_t>(k)] * mode;
    }
  }
  return g;
}

BodyForce random_force(std::shared_ptr<const FESpace> space, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> coef(-amplitude, amplitude);
  std::array<double, 6> c{};
  for (auto& v : c) v = coef(rng);
  return BodyForce::from_function(std::move(space), [c](const Point& p) {
    const double pi = std::numbers::pi;
    return Vec2(c[0] + c[1] * std::sin(pi * p.y) + c[2] * std::cos(0.5 * pi * p.x),
                c[3] + c[4] * std::sin(pi * p.x) + c[5] * std::cos(pi * p.y));
  });
}

namespace {

template <class Case>
std::vector<Case> random_cases(const std::shared_ptr<const FESpace>& space, std::mt19937_64& rng, std::size_t count,
                               double g_amplitude, double h_amplitude) {
  std::uniform_real_distribution<double> unit(0.5, 1.0);
  std::vector<Case> cases;
  cases.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Case c;
    c.g = random_profile(*space, rng, g_amplitude * unit(rng));
    BodyForce h = random_force(space, rng, h_amplitude * unit(rng));
    if constexpr (std::is_same_v<Case, StokesCase>) {
      c.h = std::move(h);
    } else {
      c.f = std::move(h);
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace

std::vector<StokesCase> random_stokes_cases(const std::shared_ptr<const FESpace>& space, std::mt19937_64& rng,
                                            std::size_t count, double g_amplitude, double h_amplitude) {
  return random_cases<StokesCase>(space, rng, count, g_amplitude, h_amplitude);
}

std::vector<NsCase> random_ns_cases(const std::shared_ptr<const FESpace>& space, std::mt19937_64& rng,
                                    std::size_t count, double g_amplitude, double f_amplitude) {
  return random_cases<NsCase>(space, rng, count, g_amplitude, f_amplitude);
}

}  // namespace inflow
