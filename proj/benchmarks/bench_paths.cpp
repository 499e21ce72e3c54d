// Whole-path and ensemble throughput: these dominate the wall-clock of every
// experiment, so regressions here are regressions everywhere.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "predprey/ctmc.hpp"
#include "predprey/model.hpp"
#include "predprey/montecarlo.hpp"
#include "predprey/ode.hpp"
#include "predprey/rng.hpp"
#include "predprey/sde.hpp"

using namespace predprey;

namespace {

const ModelParams kParams = ModelParams::from_omega(3.0, 2.0, 0.8, 100.0);

void bm_ode_integrate(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(ode::integrate(kParams, {0.8, 0.6}, 100.0));
}
BENCHMARK(bm_ode_integrate);

void bm_ssa_path(benchmark::State& state) {
  const auto omega = double(state.range(0));
  const ModelParams p = ModelParams::from_omega(3.0, 2.0, 0.8, omega);
  const ctmc::CountState x0{std::llround(0.8 * omega), std::llround(0.6 * omega)};
  std::uint64_t path = 0;
  std::int64_t jumps = 0;
  for (auto _ : state) {
    RngStream s = derive_stream(1, "bench/ssa", path++);
    const ctmc::JumpPath jp = ctmc::simulate(p, x0, 10.0, s);
    jumps += std::int64_t(jp.jump_times.size());
    benchmark::DoNotOptimize(jp.states.data());
  }
  state.SetItemsProcessed(jumps);  // items = jumps, so report is per-jump cost
}
BENCHMARK(bm_ssa_path)->Arg(100)->Arg(1000);

void bm_absorbed_em_path(benchmark::State& state) {
  const auto kind = static_cast<sde::FactorizationKind>(state.range(0));
  std::uint64_t path = 0;
  std::int64_t steps = 0;
  for (auto _ : state) {
    RngStream s = derive_stream(1, "bench/em-path", path++);
    const sde::AbsorbedPath ap = sde::simulate_absorbed(kParams, {0.8, 0.6}, 1e-2, 100.0, kind, s);
    steps += std::int64_t(ap.states.size()) - 1;
    benchmark::DoNotOptimize(ap.states.data());
  }
  state.SetItemsProcessed(steps);
}
BENCHMARK(bm_absorbed_em_path)
    ->Arg(int(sde::FactorizationKind::Event4D))
    ->Arg(int(sde::FactorizationKind::Cholesky2D))
    ->Arg(int(sde::FactorizationKind::Diagonal2D));

void bm_ensemble(benchmark::State& state) {
  mc::EnsembleConfig cfg;
  cfg.n_paths = state.range(0);
  cfg.horizon = 20.0;
  for (auto _ : state) benchmark::DoNotOptimize(mc::run_ensemble(cfg, 0));
  state.SetItemsProcessed(state.iterations() * cfg.n_paths);
}
BENCHMARK(bm_ensemble)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
