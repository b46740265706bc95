#include <benchmark/benchmark.h>

#include "kvwave/dynamics.hpp"
#include "kvwave/resolvent.hpp"

using namespace kvwave;

namespace {

DiscreteGenerator make_gen(int n, bool square) {
  const Domain domain{square ? DomainKind::Square : DomainKind::Interval, 1.0};
  const Grid grid = build_grid(domain, n);
  const Preset preset = square ? Preset::H4 : Preset::OneD_bc;
  const auto [b_field, c_field] =
      preset_config(grid, preset, PresetParams::defaults(preset, 1.0));
  return assemble_generator(grid, 1.0, b_field, c_field);
}

void BM_assemble_1d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_gen(n, false));
  }
}
BENCHMARK(BM_assemble_1d)->Arg(500)->Arg(2000);

void BM_assemble_2d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_gen(n, true));
  }
}
BENCHMARK(BM_assemble_2d)->Arg(20)->Arg(40);

void BM_midpoint_step(benchmark::State& state) {
  const DiscreteGenerator gen =
      make_gen(static_cast<int>(state.range(0)), true);
  const MidpointStepper stepper(gen, 0.05);
  SystemState s = default_initial_bump(gen);
  for (auto _ : state) {
    s = stepper.step(s);
    benchmark::DoNotOptimize(s.u.sum());
  }
}
BENCHMARK(BM_midpoint_step)->Arg(20)->Arg(40);

void BM_quartic_roots(benchmark::State& state) {
  double mu = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(characteristic_roots(1.0, 1.0, 1.0, mu));
    mu += 1.0;
    if (mu > 1000.0) mu = 1.0;
  }
}
BENCHMARK(BM_quartic_roots);

void BM_resolvent_solve(benchmark::State& state) {
  const DiscreteGenerator gen =
      make_gen(static_cast<int>(state.range(0)), false);
  ComplexState F = ComplexState::zero(gen.N(), gen.blocks);
  F.u.setConstant(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent_solve(gen, 4.2, F));
  }
}
BENCHMARK(BM_resolvent_solve)->Arg(200)->Arg(1000);

void BM_resolvent_norm(benchmark::State& state) {
  const DiscreteGenerator gen =
      make_gen(static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent_norm(gen, 4.2, 1e-6));
  }
}
BENCHMARK(BM_resolvent_norm)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
