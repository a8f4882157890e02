#include <doctest.h>

#include <sstream>
#include <string>

#include "inflow/config.hpp"
#include "inflow/errors.hpp"
#include "support/oracles.hpp"

using namespace inflow;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string echo(const ExperimentConfig& c) {
  std::ostringstream out;
  write_config(c, out);
  return out.str();
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults and overrides") {
  const ExperimentConfig d = parse("# nothing set\n\n");
  CHECK(d.viscosity == 0.1);
  CHECK(d.mesh.nx == 40);
  CHECK(d.omega.variant == OmegaVariant::Full);
  CHECK_FALSE(d.rho.has_value());

  const ExperimentConfig c = parse(
      "flow.viscosity = 0.05\n"
      "mesh.nx = 12   # trailing comment\n"
      "omega_part.variant = subdomains\n"
      "omega_part.subdomains = 0.5:1.5, 3:4\n"
      "admissible.rho = 2.5\n"
      "optimizer.gradient = fd\n"
      "picard.damping = 0.7\n"
      "sweep.amplitudes = 0.5, 1, 2\n");
  CHECK(c.viscosity == 0.05);
  CHECK(c.mesh.nx == 12);
  REQUIRE(c.omega.subdomains.size() == 2);
  CHECK(c.omega.subdomains[1].first == 3.0);
  CHECK(c.rho == 2.5);
  CHECK(c.optimizer.gradient == GradientKind::FiniteDifference);
  CHECK(c.picard.damping == 0.7);
  CHECK(c.sweep_amplitudes.size() == 3);
}

TEST_CASE("echo reproduces the configuration") {
  const ExperimentConfig c = parse(
      "mesh.stenosis.amplitude = 0.123456789012345\n"
      "omega_part.variant = sections\n"
      "omega_part.sections = 1.25, 3.5\n"
      "data.noise = 0.01\n"
      "data.seed = 18446744073709551615\n"
      "cost.beta2 = 1e-7\n");
  const std::string text = echo(c);
  CHECK(echo(parse(text)) == text);
  CHECK(parse(text).seed == 18446744073709551615ull);
  CHECK(echo(parse("")) == echo(parse(echo(parse("")))));
}

TEST_CASE("errors name the key and line") {
  CHECK(error_of("flow.viscosity = 0.1\nflow.viscocity = 1\n") == "line 2: unknown key 'flow.viscocity'");
  CHECK(error_of("mesh.nx = 4\nmesh.nx = 5\n").find("line 2: duplicate key 'mesh.nx'") == 0);
  CHECK(error_of("cost.beta1 = 0\n") == "line 1: cost.beta1: beta1 must be positive");
  CHECK(error_of("\n\nmesh.nx = four\n").find("line 3: mesh.nx:") == 0);
  CHECK(error_of("just words\n") == "line 1: expected 'key = value'");
  CHECK(error_of("picard.damping = 0\n").find("damping must lie in (0, 1]") != std::string::npos);
  CHECK(error_of("omega_part.variant = sections\n").find("omega_part.sections") != std::string::npos);
  CHECK(error_of("omega_part.subdomains = 0:2, 1:3\n").find("overlap") != std::string::npos);
  CHECK(error_of("omega_part.sections = 2, 1\n").find("strictly increasing") != std::string::npos);
  CHECK(error_of("omega_part.variant = sections\nomega_part.sections = 7\n").find("outside") !=
        std::string::npos);
  CHECK(error_of("mesh.stenosis.amplitude = 0.6\n").find("below half the channel height") != std::string::npos);
  CHECK(error_of("data.seed = -3\n").find("unsigned") != std::string::npos);
  CHECK(error_of("optimizer.bb = maybe\n").find("true or false") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/inflow.cfg"), IoError);
}

TEST_CASE("observation regions resolve on a space") {
  const auto space = oracle::channel_space(4.0, 1.0, 8, 2);
  OmegaConfig oc;
  oc.variant = OmegaVariant::Subdomains;
  oc.subdomains = {{0.0, 1.0}, {2.0, 3.0}};
  const OmegaPartSpec spec = resolve_omega(oc, *space);
  REQUIRE(spec.subdomains.size() == 2);
  CHECK(spec.subdomains[0] == elements_in_x_range(*space, 0.0, 1.0));
  CHECK(spec.subdomains[0].size() == 2 * 2 * 2);

  oc.subdomains = {{0.05, 0.1}};
  CHECK_THROWS_AS(resolve_omega(oc, *space), ParameterError);

  OmegaConfig sections;
  sections.variant = OmegaVariant::Sections;
  sections.sections = {1.0, 2.5};
  CHECK(resolve_omega(sections, *space).sections == sections.sections);
}

}  // TEST_SUITE
