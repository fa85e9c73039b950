#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pic/controller.hpp"
#include "pic/feasibility.hpp"
#include "pic/simulator.hpp"

using namespace pic;

namespace {

const CascadeConfig kExample1Cascade{{{4.5, kLinearShape, FunnelParams{1.0, 0.05, 0.9}},
                                      {8.0, kLinearShape, FunnelParams{1.4, 0.05, 1.0}}}};
const BoundsSpec kExample1Bounds{{0.0, 9.8 * std::sqrt(2.0)}, {1.0, 100.0}, {1.0, 100.0},
                                 {0.0, 0.5}, 1.0, 0.5};

Scenario example1(double horizon) {
  const auto ex = builtin_system(BuiltinSystem::pendulum_ex1);
  Scenario s;
  s.system = ex.system;
  s.reference = ex.reference;
  s.controller = kExample1Cascade;
  s.bounds = kExample1Bounds;
  s.x0 = ex.x0;
  s.horizon = horizon;
  s.step = 1e-3;
  s.substeps = 10;
  return s;
}

RegionTemplate example1_template() {
  RegionTemplate t;
  t.stages = {{4.5, kLinearShape, 0.5, 0.05, 0.9}, {8.0, kLinearShape, 0.1, 0.05, 1.0}};
  t.bounds = kExample1Bounds;
  t.reference_at_zero = 0.0;
  return t;
}

void BM_Cascade(benchmark::State& state) {
  const std::vector<double> xi{-0.3, 0.7};
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cascade(xi, t, kExample1Cascade, 0.0));
    t += 1e-6;
  }
}
BENCHMARK(BM_Cascade);

void BM_CheckFeasibility(benchmark::State& state) {
  const std::vector<double> z0{-0.5, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_feasibility(kExample1Cascade, kExample1Bounds, z0));
  }
}
BENCHMARK(BM_CheckFeasibility);

void BM_RegionSweep(benchmark::State& state) {
  RegionGrid grid;
  grid.nx = grid.ny = static_cast<std::size_t>(state.range(0));
  const auto tmpl = example1_template();
  for (auto _ : state) benchmark::DoNotOptimize(feasible_region(grid, tmpl));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.nx * grid.ny));
}
BENCHMARK(BM_RegionSweep)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const auto scenario = example1(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(scenario));
}
BENCHMARK(BM_Simulate)->Arg(2)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
