#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "inflow/assimilation.hpp"
#include "inflow/errors.hpp"
#include "inflow/navier_stokes.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

int report(const char* prefix, const std::exception& e, int code) {
  std::cerr << "error: " << prefix << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace inflow;
  cli::CommonOptions opts;
  std::function<int()> action;

  CLI::App app{"Inlet velocity reconstruction for steady channel flow"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.add_option("--config", opts.config, "Experiment configuration (key = value)")->check(CLI::ExistingFile);
  app.add_option("--out", opts.out, "Run directory")->required();
  app.add_option("--seed", opts.seed, "Override data.seed");
  app.add_flag("--quiet", opts.quiet, "Only errors on the terminal");

  auto* mesh = app.add_subcommand("mesh", "Generate or validate meshes")->require_subcommand(1);
  mesh->add_subcommand("generate", "Write the configured channel mesh")->callback([&] {
    action = [&] { return cli::mesh_generate(opts); };
  });
  std::optional<std::filesystem::path> mesh_path;
  auto* validate = mesh->add_subcommand("validate", "Check mesh invariants");
  validate->add_option("mesh", mesh_path, "Mesh file (defaults to the configured mesh)");
  validate->callback([&] { action = [&] { return cli::mesh_validate(opts, mesh_path); }; });

  auto* solve = app.add_subcommand("solve", "Forward solve with the configured inlet")->require_subcommand(1);
  for (const char* model : {"stokes", "ns"}) {
    solve->add_subcommand(model, std::string(model) == "ns" ? "Navier-Stokes by Picard iteration" : "Stokes")
        ->callback([&, model] { action = [&, model] { return cli::solve(opts, model); }; });
  }

  app.add_subcommand("assimilate", "Reconstruct the inlet profile from measurements")->callback([&] {
    action = [&] { return cli::assimilate(opts); };
  });

  auto* verify = app.add_subcommand("verify", "Numerical property checks")->require_subcommand(1);
  verify->add_subcommand("estimates", "A-priori estimates on random cases")->callback([&] {
    action = [&] { return cli::verify_estimates(opts); };
  });
  verify->add_subcommand("contraction", "Picard contraction ratios")->callback([&] {
    action = [&] { return cli::verify_contraction(opts); };
  });
  auto* gradient = verify->add_subcommand("gradient", "Adjoint against finite-difference gradients");
  gradient->add_option("--workers", opts.workers, "Threads for finite-difference probes")->check(CLI::PositiveNumber);
  gradient->callback([&] { action = [&] { return cli::verify_gradient(opts); }; });
  verify->add_subcommand("convexity", "Midpoint convexity and continuity of the data term")->callback([&] {
    action = [&] { return cli::verify_convexity(opts); };
  });

  auto* sweep = app.add_subcommand("sweep", "Contraction sweep over amplitude and viscosity");
  sweep->add_option("--workers", opts.workers, "Concurrent cases")->check(CLI::PositiveNumber);
  sweep->callback([&] { action = [&] { return cli::sweep(opts); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage: ", e, kExitValidation);
  }

  try {
    return action ? action() : kExitFailure;
  } catch (const DivergenceError& e) {
    return report("divergence: ", e, kExitDivergence);
  } catch (const StagnationError& e) {
    return report("stagnation: ", e, kExitFailure);
  } catch (const ParseError& e) {
    return report("validation: ", e, kExitValidation);
  } catch (const ParameterError& e) {
    return report("validation: ", e, kExitValidation);
  } catch (const InvariantError& e) {
    return report("validation: ", e, kExitValidation);
  } catch (const DegenerateDomainError& e) {
    return report("validation: ", e, kExitValidation);
  } catch (const IoError& e) {
    return report("io: ", e, kExitFailure);
  } catch (const SolverError& e) {
    return report("solver: ", e, kExitFailure);
  } catch (const cli::CheckFailed& e) {
    return report("check failed: ", e, kExitFailure);
  } catch (const std::exception& e) {
    return report("", e, kExitFailure);
  }
  return kExitOk;
}
