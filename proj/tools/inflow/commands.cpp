#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "inflow/assimilation.hpp"
#include "inflow/config.hpp"
#include "inflow/io.hpp"
#include "inflow/navier_stokes.hpp"
#include "inflow/norms.hpp"
#include "inflow/stokes.hpp"
#include "inflow/synthetic.hpp"
#include "run_dir.hpp"

namespace inflow::cli {

namespace {

constexpr std::size_t kConvexityPairs = 100;
constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientPicardTol = 1e-12;

const std::vector<std::string> kPicardColumns{"k", "update_h1", "h_update_l32", "ratio", "residual"};

struct Context {
  ExperimentConfig config;
  RunDirectory run;
  std::shared_ptr<const FESpace> space;
  BodyForce force;
  bool quiet = false;

  void say(const std::string& line) const {
    if (!quiet) std::cout << line << std::endl;
  }
};

ExperimentConfig effective_config(const CommonOptions& opts) {
  ExperimentConfig config = opts.config ? load_config(*opts.config) : ExperimentConfig{};
  if (opts.seed) config.seed = *opts.seed;
  return config;
}

Mesh make_mesh(const ExperimentConfig& config) {
  return config.mesh_file ? load_mesh(*config.mesh_file) : build_channel_mesh(config.mesh);
}

Context open_run(const CommonOptions& opts) {
  ExperimentConfig config = effective_config(opts);
  RunDirectory run(opts.out);
  run.echo_config(config);
  Mesh mesh = make_mesh(config);
  save_mesh(mesh, run.file("mesh.txt"));
  auto space = build_taylor_hood(std::move(mesh));
  const Vec2 fc = config.force;
  BodyForce force = BodyForce::from_function(space, [fc](const Point&) { return fc; });
  return Context{std::move(config), std::move(run), std::move(space), std::move(force), opts.quiet};
}

ControlProfile inlet_profile(const Context& ctx) {
  const auto& in = ctx.config.inlet;
  return make_profile(*ctx.space, in.kind, in.amplitude, in.components);
}

void add_space_info(Summary& s, const FESpace& space) {
  s.add("nodes", space.node_count());
  s.add("elements", space.element_count());
  s.add("velocity_dofs", space.velocity_size());
  s.add("pressure_dofs", space.pressure_size());
}

void add_field_info(Summary& s, const FlowField& field) {
  const FESpace& space = *field.space;
  const auto ns = static_cast<Eigen::Index>(space.scalar_count());
  s.add("weak_divergence_max", weak_divergence_max(space, field.u));
  s.add("divergence_l2", divergence_l2(space, field.u));
  s.add("velocity_h1_norm_sq", h1_norm_sq(space, field.u));
  s.add("max_velocity_x", field.u.head(ns).maxCoeff());
}

void write_picard(const std::filesystem::path& path, const PicardReport& report) {
  CsvWriter csv(path, kPicardColumns);
  for (const auto& it : report.history) {
    csv << it.k << it.update_h1 << it.h_update_l32 << it.ratio << it.residual;
    csv.end_row();
  }
  csv.close();
}

void add_picard_info(Summary& s, const PicardReport& report) {
  s.add("picard_iterations", report.iterations());
  s.add("converged", report.converged);
  s.add("max_ratio", report.max_ratio());
  s.add("ns_residual", report.final_residual);
}

std::string variant_name(OmegaVariant v) { return std::string(to_string(v)); }

// Measurements, truth and the solver shared by the commands that work with
// the cost functional.
struct DataSetup {
  std::shared_ptr<const NavierStokesSolver> solver;
  MeasurementSet data;
  std::optional<ControlProfile> truth;
  CostConfig cost;
};

DataSetup prepare_data(const Context& ctx, const PicardOptions& picard) {
  const auto& cfg = ctx.config;
  DataSetup d;
  d.solver = std::make_shared<const NavierStokesSolver>(ctx.space, cfg.viscosity);
  d.cost.beta1 = cfg.beta1;
  d.cost.beta2 = cfg.beta2;
  d.cost.beta3 = cfg.beta3;
  d.cost.omega = resolve_omega(cfg.omega, *ctx.space);
  d.cost.check();
  if (cfg.data_file) {
    d.data = load_measurements(*cfg.data_file);
    d.truth = d.data.truth;
    ctx.say("loaded measurements from " + cfg.data_file->string());
  } else {
    const ControlProfile truth = inlet_profile(ctx);
    d.data = generate_measurements(*d.solver, truth, ctx.force, d.cost.omega, cfg.noise, cfg.seed, picard);
    d.truth = truth;
    ctx.say("generated " + variant_name(d.cost.omega.variant) + " measurements from the " + cfg.inlet.kind +
            " inlet");
  }
  save_measurements(d.data, *ctx.space, ctx.run.file("measurements.txt"));
  return d;
}

double resolve_rho(const Context& ctx, const NavierStokesSolver& solver, Summary& s) {
  const auto& cfg = ctx.config;
  if (cfg.rho) {
    s.add("rho_source", "config");
    s.add("rho", *cfg.rho);
    return *cfg.rho;
  }
  const ControlProfile shape = make_profile(*ctx.space, cfg.inlet.kind, 1.0, cfg.inlet.components);
  const auto rho = suggest_radius(solver, shape, ctx.force, cfg.sweep_amplitudes);
  if (!rho) {
    throw ParameterError(
        "admissible.rho = auto: no sweep amplitude reaches an empirical contraction constant <= 0.8; "
        "set admissible.rho explicitly");
  }
  s.add("rho_source", "auto");
  s.add("rho", *rho);
  ctx.say("admissible radius from contraction sweep: " + format_number(*rho));
  return *rho;
}

ControlProfile initial_control(const Context& ctx) {
  const auto& init = ctx.config.init;
  if (init.kind == "zero") return ControlProfile::zero(*ctx.space);
  return make_profile(*ctx.space, init.kind, init.amplitude, init.components);
}

void write_assimilation(const Context& ctx, const AssimilationReport& report, const std::optional<ControlProfile>& truth,
                        Summary& s) {
  CsvWriter csv(ctx.run.file("iterations.csv"), {"k", "J", "term1", "term2", "term3", "grad_norm", "step", "projected",
                                                 "trials", "picard_iterations", "control_norm"});
  for (const auto& it : report.history) {
    csv << it.k << it.cost.J << it.cost.term1 << it.cost.term2 << it.cost.term3 << it.grad_norm << it.step
        << it.projected << it.trials << it.picard_iterations << it.control_norm;
    csv.end_row();
  }
  csv.close();

  const ControlProfile& g = report.final_g;
  CsvWriter control(ctx.run.file("control.csv"), {"s", "gx", "gy", "truth_gx", "truth_gy"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < g.size(); ++i) {
    control << g.s[i] << g.gx[i] << g.gy[i] << (truth ? truth->gx[i] : nan) << (truth ? truth->gy[i] : nan);
    control.end_row();
  }
  control.close();
  if (report.final_state.space) save_vtk(report.final_state, ctx.run.file("state.vtk"));

  const auto& last = report.history.back();
  s.add("iterations", last.k);
  s.add("initial_J", report.initial_J);
  s.add("final_J", last.cost.J);
  s.add("final_term1", last.cost.term1);
  s.add("J_reduction", last.cost.J > 0.0 ? report.initial_J / last.cost.J : std::numeric_limits<double>::infinity());
  s.add("final_grad_norm", last.grad_norm);
  s.add("final_control_norm", last.control_norm);
  s.add("converged", report.converged);
  s.add("stop_reason", report.stop_reason);
  if (report.recovery_error) s.add("recovery_error", *report.recovery_error);
  s.save(ctx.run.file("summary.txt"));
}

}  // namespace

int mesh_generate(const CommonOptions& opts) {
  const Context ctx = open_run(opts);
  const Mesh& mesh = ctx.space->mesh();
  Summary s;
  s.add("nodes", mesh.nodes.size());
  s.add("triangles", mesh.triangles.size());
  s.add("edges", mesh_edges(mesh).size());
  s.add("boundary_in", mesh.count_tag(BoundaryTag::In));
  s.add("boundary_out", mesh.count_tag(BoundaryTag::Out));
  s.add("boundary_wall", mesh.count_tag(BoundaryTag::Wall));
  s.add("area", mesh.area());
  double ymax = 0.0;
  for (const auto& p : mesh.nodes) ymax = std::max(ymax, p.y);
  double min_top = ymax;
  for (const auto& e : mesh.boundary) {
    if (e.tag != BoundaryTag::Wall) continue;
    for (std::size_t n : {e.a, e.b}) {
      if (mesh.nodes[n].y > 0.5 * ymax) min_top = std::min(min_top, mesh.nodes[n].y);
    }
  }
  s.add("min_top_wall_y", min_top);
  s.save(ctx.run.file("summary.txt"));
  ctx.say("mesh: " + std::to_string(mesh.nodes.size()) + " nodes, " + std::to_string(mesh.triangles.size()) +
          " triangles");
  return 0;
}

int mesh_validate(const CommonOptions& opts, const std::optional<std::filesystem::path>& path) {
  const ExperimentConfig config = effective_config(opts);
  RunDirectory run(opts.out);
  run.echo_config(config);
  const Mesh mesh = path ? load_mesh(*path) : make_mesh(config);
  const auto findings = validate_mesh(mesh);
  Summary s;
  s.add("nodes", mesh.nodes.size());
  s.add("triangles", mesh.triangles.size());
  s.add("findings", findings.size());
  s.add("valid", findings.empty());
  s.save(run.file("summary.txt"));
  for (const auto& f : findings) std::cout << f.kind << ": " << f.message << '\n';
  if (!findings.empty()) {
    throw InvariantError("mesh has " + std::to_string(findings.size()) + " invariant violation(s); first: " +
                         findings.front().message);
  }
  save_mesh(mesh, run.file("mesh.txt"));
  if (!opts.quiet) std::cout << "mesh is valid\n";
  return 0;
}

int solve(const CommonOptions& opts, const std::string& model) {
  if (model != "stokes" && model != "ns") throw ParameterError("unknown model '" + model + "'");
  const Context ctx = open_run(opts);
  const auto& cfg = ctx.config;
  const ControlProfile g = inlet_profile(ctx);
  Summary s;
  s.add("model", model);
  add_space_info(s, *ctx.space);
  s.add("viscosity", cfg.viscosity);
  s.add("inlet_norm_sq", boundary_h01_norm_sq(g));

  if (model == "stokes") {
    const auto stokes = std::make_shared<const StokesSolver>(ctx.space, cfg.viscosity);
    const auto solution = stokes->solve_detailed(g, assemble_load(*ctx.space, ctx.force));
    s.add("linear_residual", solution.relative_residual);
    s.add("stokes_residual", stokes_residual(*stokes, solution.field, g, ctx.force));
    add_field_info(s, solution.field);
    write_picard(ctx.run.file("iterations.csv"), PicardReport{});
    save_vtk(solution.field, ctx.run.file("solution.vtk"));
    s.save(ctx.run.file("summary.txt"));
    ctx.say("stokes solve done");
    return 0;
  }

  const NavierStokesSolver solver(ctx.space, cfg.viscosity);
  try {
    const auto [field, report] = solver.solve(g, ctx.force, cfg.picard);
    write_picard(ctx.run.file("iterations.csv"), report);
    add_picard_info(s, report);
    add_field_info(s, field);
    save_vtk(field, ctx.run.file("solution.vtk"));
    s.save(ctx.run.file("summary.txt"));
    ctx.say("picard converged in " + std::to_string(report.iterations()) + " iterations, residual " +
            format_number(report.final_residual));
  } catch (const DivergenceError& e) {
    write_picard(ctx.run.file("iterations.csv"), e.report());
    add_picard_info(s, e.report());
    s.save(ctx.run.file("summary.txt"));
    throw;
  }
  return 0;
}

int assimilate(const CommonOptions& opts) {
  const Context ctx = open_run(opts);
  const auto& cfg = ctx.config;
  const DataSetup d = prepare_data(ctx, cfg.picard);
  Summary s;
  s.add("variant", variant_name(d.cost.omega.variant));
  add_space_info(s, *ctx.space);
  s.add("viscosity", cfg.viscosity);
  s.add("beta1", d.cost.beta1);
  s.add("beta2", d.cost.beta2);
  s.add("beta3", d.cost.beta3);
  s.add("noise_sigma", d.data.noise ? d.data.noise->sigma : 0.0);
  s.add("seed", std::to_string(cfg.seed));
  const AdmissibleSet set{resolve_rho(ctx, *d.solver, s)};
  if (d.truth) {
    s.add("truth_norm", control_norm(*d.truth));
    if (!set.contains(*d.truth)) std::cerr << "warning: the ground-truth inlet lies outside the admissible ball\n";
  }
  const ControlProfile g0 = initial_control(ctx);
  s.add("initial_control_norm", control_norm(g0));

  const ReducedProblem problem(d.solver, ctx.force, CostFunctional(ctx.space, d.cost, d.data), cfg.picard);
  try {
    const auto report = assimilate(problem, set, g0, cfg.optimizer, d.truth);
    write_assimilation(ctx, report, d.truth, s);
    ctx.say("assimilation stopped (" + report.stop_reason + ") after " +
            std::to_string(report.history.back().k) + " iterations, J = " +
            format_number(report.history.back().cost.J));
    if (report.recovery_error) ctx.say("relative recovery error " + format_number(*report.recovery_error));
  } catch (const StagnationError& e) {
    write_assimilation(ctx, e.report(), d.truth, s);
    throw;
  }
  return 0;
}

int verify_estimates(const CommonOptions& opts) {
  const Context ctx = open_run(opts);
  const auto& cfg = ctx.config;
  std::mt19937_64 rng(cfg.seed);

  const auto stokes = std::make_shared<const StokesSolver>(ctx.space, cfg.viscosity);
  const auto sr = verify_stokes_estimate(*stokes, random_stokes_cases(ctx.space, rng, cfg.verify_cases, 1.0, 1.0));
  const NavierStokesSolver ns(stokes);
  const auto ns_cases = random_ns_cases(ctx.space, rng, cfg.verify_cases, 0.3, 0.5);
  const auto nr = verify_ns_estimate(ns, ns_cases, cfg.picard);

  CsvWriter csv(ctx.run.file("iterations.csv"), {"estimate", "case", "margin"});
  for (std::size_t i = 0; i < sr.holdout_margins.size(); ++i) {
    csv << "stokes" << i << sr.holdout_margins[i];
    csv.end_row();
  }
  for (std::size_t i = 0; i < nr.holdout_margins.size(); ++i) {
    csv << "ns" << i << nr.holdout_margins[i];
    csv.end_row();
  }
  csv.close();

  Summary s;
  add_space_info(s, *ctx.space);
  s.add("viscosity", cfg.viscosity);
  for (const auto& [name, r] : {std::pair{"stokes", &sr}, std::pair{"ns", &nr}}) {
    const std::string p(name);
    s.add(p + "_fitted_c", r->fitted_c);
    s.add(p + "_margin_factor", r->margin_factor);
    s.add(p + "_calibration_cases", r->calibration_count);
    s.add(p + "_holdout_cases", r->holdout_count);
    s.add(p + "_excluded_cases", r->excluded.size());
    s.add(p + "_violations", r->violations);
    s.add(p + "_degenerate", r->degenerate);
    const double min_margin = r->holdout_margins.empty()
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : *std::min_element(r->holdout_margins.begin(), r->holdout_margins.end());
    s.add(p + "_min_margin", min_margin);
  }
  s.save(ctx.run.file("summary.txt"));
  ctx.say("stokes estimate: c = " + format_number(sr.fitted_c) + ", " + std::to_string(sr.violations) +
          " held-out violations");
  ctx.say("navier-stokes estimate: c = " + format_number(nr.fitted_c) + ", " + std::to_string(nr.violations) +
          " held-out violations, " + std::to_string(nr.excluded.size()) + " excluded");
  if (sr.violations > 0 || nr.violations > 0) {
    throw CheckFailed("a-priori estimate violated on " + std::to_string(sr.violations + nr.violations) +
                      " held-out case(s)");
  }
  if (sr.degenerate || nr.degenerate) throw CheckFailed("degenerate calibration");
  return 0;
}

int verify_contraction(const CommonOptions& opts) {
  const Context ctx = open_run(opts);
  const auto& cfg = ctx.config;
  const ControlProfile g = inlet_profile(ctx);
  const NavierStokesSolver solver(ctx.space, cfg.viscosity);
  const auto estimate = estimate_contraction(solver, g, ctx.force, picard_probes(solver, g, ctx.force, 6));

  Summary s;
  add_space_info(s, *ctx.space);
  s.add("viscosity", cfg.viscosity);
  s.add("damping", cfg.picard.damping);
  s.add("inlet_norm_sq", boundary_h01_norm_sq(g));
  s.add("contraction_estimate", estimate.max_ratio);
  const auto record = [&](const PicardReport& report) {
    write_picard(ctx.run.file("iterations.csv"), report);
    add_picard_info(s, report);
    bool below = true;
    for (const auto& it : report.history) {
      if (it.k >= 2 && !(it.ratio < 1.0)) below = false;
    }
    s.add("ratios_below_one", below);
    s.save(ctx.run.file("summary.txt"));
  };
  try {
    const auto result = solver.solve(g, ctx.force, cfg.picard);
    record(result.second);
    ctx.say("picard converged in " + std::to_string(result.second.iterations()) + " iterations, max ratio " +
            format_number(result.second.max_ratio()) + ", contraction estimate " +
            format_number(estimate.max_ratio));
  } catch (const DivergenceError& e) {
    record(e.report());
    throw;
  }
  return 0;
}

int verify_gradient(const CommonOptions& opts) {
  const Context ctx = open_run(opts);
  const auto& cfg = ctx.config;
  PicardOptions picard = cfg.picard;
  picard.tol = std::min(picard.tol, kGradientPicardTol);
  picard.max_iter = std::max(picard.max_iter, 400);
  const DataSetup d = prepare_data(ctx, picard);
  Summary s;
  s.add("variant", variant_name(d.cost.omega.variant));
  add_space_info(s, *ctx.space);
  s.add("picard_tol", picard.tol);
  const AdmissibleSet set{resolve_rho(ctx, *d.solver, s)};
  const ReducedProblem problem(d.solver, ctx.force, CostFunctional(ctx.space, d.cost, d.data), picard);

  std::mt19937_64 rng(cfg.seed);
  CsvWriter csv(ctx.run.file("iterations.csv"), {"case", "fd_step", "relative_error", "flagged"});
  double worst = 0.0;
  for (std::size_t c = 0; c < cfg.verify_gradient_cases; ++c) {
    const ControlProfile g = project_to_ball(random_profile(*ctx.space, rng, 0.15), set);
    const auto state = problem.state(g);
    const Eigen::VectorXd adjoint = problem.gradient_adjoint(g, state);
    double best = std::numeric_limits<double>::infinity();
    for (double step : cfg.verify_fd_steps) {
      const auto fd = problem.gradient_fd(g, step, std::max(1u, opts.workers));
      const double err =
          fd.flagged.empty() ? relative_error(adjoint, fd.gradient) : std::numeric_limits<double>::infinity();
      best = std::min(best, err);
      csv << c << step << err << fd.flagged.size();
      csv.end_row();
    }
    worst = std::max(worst, best);
    ctx.say("case " + std::to_string(c) + ": min relative error " + format_number(best));
  }
  csv.close();
  s.add("cases", cfg.verify_gradient_cases);
  s.add("max_relative_error", worst);
  s.add("tolerance", kGradientTolerance);
  s.add("pass", worst <= kGradientTolerance);
  s.save(ctx.run.file("summary.txt"));
  if (!opts.quiet) std::cout << "max_relative_error = " << format_number(worst) << '\n';
  if (!(worst <= kGradientTolerance)) {
    throw CheckFailed("adjoint and finite-difference gradients differ by " + format_number(worst));
  }
  return 0;
}

int verify_convexity(const CommonOptions& opts) {
  const Context ctx = open_run(opts);
  const auto& cfg = ctx.config;
  const DataSetup d = prepare_data(ctx, cfg.picard);
  const CostFunctional cost(ctx.space, d.cost, d.data);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto n = static_cast<Eigen::Index>(ctx.space->velocity_size());
  const auto random_field = [&] {
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = coef(rng);
    return u;
  };

  CsvWriter csv(ctx.run.file("iterations.csv"), {"pair", "lhs", "rhs", "slack", "pass"});
  std::size_t failures = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kConvexityPairs; ++i) {
    const Eigen::VectorXd u1 = random_field();
    const Eigen::VectorXd u2 = random_field();
    const auto r = midpoint_convexity_check(cost, u1, u2);
    failures += r.pass ? 0 : 1;
    min_slack = std::min(min_slack, r.slack);
    csv << i << r.lhs << r.rhs << r.slack << r.pass;
    csv.end_row();
  }
  csv.close();

  const Eigen::VectorXd u = random_field();
  const Eigen::VectorXd dir = random_field();
  const auto table = continuity_modulus_check(cost, u, dir, {1e-1, 5e-2, 2.5e-2, 1.25e-2});
  CsvWriter cont(ctx.run.file("continuity.csv"), {"eps", "delta_h1", "difference", "ratio"});
  for (const auto& row : table.rows) {
    cont << row.eps << row.delta_h1 << row.difference << row.ratio;
    cont.end_row();
  }
  cont.close();

  Summary s;
  s.add("variant", variant_name(d.cost.omega.variant));
  add_space_info(s, *ctx.space);
  s.add("pairs", kConvexityPairs);
  s.add("failures", failures);
  s.add("min_slack", min_slack);
  s.add("continuity_constant", table.fitted_constant);
  s.save(ctx.run.file("summary.txt"));
  ctx.say(std::to_string(kConvexityPairs - failures) + "/" + std::to_string(kConvexityPairs) +
          " pairs satisfy midpoint convexity, min slack " + format_number(min_slack));
  if (failures > 0) throw CheckFailed("midpoint convexity failed on " + std::to_string(failures) + " pair(s)");
  return 0;
}

int sweep(const CommonOptions& opts) {
  const Context ctx = open_run(opts);
  const auto& cfg = ctx.config;
  const ControlProfile shape = make_profile(*ctx.space, cfg.inlet.kind, 1.0, cfg.inlet.components);

  std::vector<std::shared_ptr<const NavierStokesSolver>> solvers;
  for (double nu : cfg.sweep_viscosities) solvers.push_back(std::make_shared<const NavierStokesSolver>(ctx.space, nu));

  struct Job {
    std::size_t viscosity = 0;
    double amplitude = 0.0;
    SweepPoint result;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < solvers.size(); ++v) {
    for (double a : cfg.sweep_amplitudes) jobs.push_back({v, a, {}});
  }

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  std::mutex log_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      Job& job = jobs[i];
      try {
        const auto pt = sweep_contraction(*solvers[job.viscosity], shape, ctx.force, {job.amplitude}, cfg.picard);
        job.result = pt.points.front();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
        return;
      }
      if (!ctx.quiet) {
        std::lock_guard lock(log_mutex);
        std::cout << "nu " << format_number(cfg.sweep_viscosities[job.viscosity]) << " amplitude "
                  << format_number(job.amplitude) << ": c = " << format_number(job.result.contraction)
                  << (job.result.converged ? ", converged" : ", diverged") << std::endl;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  CsvWriter csv(ctx.run.file("iterations.csv"),
                {"viscosity", "amplitude", "control_norm", "contraction", "converged", "picard_iterations"});
  const double shape_norm = control_norm(shape);
  for (const auto& job : jobs) {
    csv << cfg.sweep_viscosities[job.viscosity] << job.amplitude << std::abs(job.amplitude) * shape_norm
        << job.result.contraction << job.result.converged << job.result.iterations;
    csv.end_row();
  }
  csv.close();

  Summary s;
  add_space_info(s, *ctx.space);
  s.add("inlet_kind", cfg.inlet.kind);
  s.add("cases", jobs.size());
  for (std::size_t v = 0; v < solvers.size(); ++v) {
    std::vector<const Job*> row;
    for (const auto& job : jobs) {
      if (job.viscosity == v) row.push_back(&job);
    }
    std::sort(row.begin(), row.end(), [](const Job* a, const Job* b) { return a->amplitude < b->amplitude; });
    std::string crossing = "none";
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i]->result.contraction > 1.0) {
        if (i > 0) crossing = format_number(row[i - 1]->amplitude) + ":" + format_number(row[i]->amplitude);
        break;
      }
    }
    std::string first_diverged = "none";
    for (const Job* job : row) {
      if (!job->result.converged) {
        first_diverged = format_number(job->amplitude);
        break;
      }
    }
    const std::string p = "sweep." + std::to_string(v) + ".";
    s.add(p + "viscosity", cfg.sweep_viscosities[v]);
    s.add(p + "crossing", crossing);
    s.add(p + "first_diverged_amplitude", first_diverged);
  }
  s.save(ctx.run.file("summary.txt"));
  return 0;
}

}  // namespace inflow::cli
