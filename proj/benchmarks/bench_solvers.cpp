#include <benchmark/benchmark.h>

#include <memory>

#include "inflow/assembly.hpp"
#include "inflow/assimilation.hpp"
#include "inflow/navier_stokes.hpp"
#include "inflow/stokes.hpp"
#include "inflow/synthetic.hpp"

using namespace inflow;

namespace {

std::shared_ptr<const FESpace> channel(benchmark::State& state) {
  const auto nx = static_cast<std::size_t>(state.range(0));
  return build_taylor_hood(build_channel_mesh(ChannelParams{5.0, 1.0, nx, nx / 5, Stenosis{0.3, 2.5, 1.0}}));
}

BodyForce zero(const std::shared_ptr<const FESpace>& space) {
  return BodyForce::from_function(space, [](const Point&) -> Vec2 { return Vec2::Zero(); });
}

void set_dofs(benchmark::State& state, const FESpace& space) {
  state.counters["dofs"] = static_cast<double>(space.velocity_size() + space.pressure_size());
}

void BM_AssembleStokes(benchmark::State& state) {
  const auto space = channel(state);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stokes(*space, 0.1));
  set_dofs(state, *space);
}

void BM_AssembleConvection(benchmark::State& state) {
  const auto space = channel(state);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(space->velocity_size()));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_convection(*space, w));
  set_dofs(state, *space);
}

void BM_StokesFactor(benchmark::State& state) {
  const auto space = channel(state);
  for (auto _ : state) StokesSolver solver(space, 0.1);
  set_dofs(state, *space);
}

void BM_StokesSolve(benchmark::State& state) {
  const auto space = channel(state);
  const StokesSolver solver(space, 0.1);
  const ControlProfile g = make_profile(*space, ProfileKind::Parabolic, 1.0);
  const Eigen::VectorXd load = assemble_load(*space, zero(space));
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(g, load));
  set_dofs(state, *space);
}

void BM_Picard(benchmark::State& state) {
  const auto space = channel(state);
  const NavierStokesSolver solver(space, 0.1);
  const ControlProfile g = make_profile(*space, ProfileKind::Parabolic, 1.0);
  const BodyForce f = zero(space);
  int iterations = 0;
  for (auto _ : state) iterations = solver.solve(g, f, PicardOptions{1e-8, 200, 0.7}).second.iterations();
  state.counters["picard_iterations"] = iterations;
  set_dofs(state, *space);
}

void BM_AdjointGradient(benchmark::State& state) {
  const auto space = channel(state);
  const auto solver = std::make_shared<const NavierStokesSolver>(space, 0.1);
  const BodyForce f = zero(space);
  const ControlProfile truth = make_profile(*space, ProfileKind::Sine, 0.5);
  const PicardOptions picard{1e-10, 200, 1.0};
  MeasurementSet data = generate_measurements(*solver, truth, f, OmegaPartSpec::full(), 0.0, 1, picard);
  const ReducedProblem problem(solver, f, CostFunctional(space, CostConfig{}, std::move(data)), picard);
  const ControlProfile g = truth.scaled(0.8);
  const FlowField u = problem.state(g);
  for (auto _ : state) benchmark::DoNotOptimize(problem.gradient_adjoint(g, u));
  set_dofs(state, *space);
}

}  // namespace

BENCHMARK(BM_AssembleStokes)->Arg(40)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleConvection)->Arg(40)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StokesFactor)->Arg(40)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StokesSolve)->Arg(40)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Picard)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdjointGradient)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
