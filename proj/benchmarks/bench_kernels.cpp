// Per-call cost of the hot kernels: the rate/covariance closed forms, the
// three factorizations, and the random layer they sit on.

#include <benchmark/benchmark.h>

#include "predprey/model.hpp"
#include "predprey/rng.hpp"
#include "predprey/sde.hpp"

using namespace predprey;

namespace {

const ModelParams kParams = ModelParams::from_omega(3.0, 2.0, 0.8, 100.0);
const DensityState kState{0.9, 0.7};

void bm_rates(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rates(kParams, kState));
}
BENCHMARK(bm_rates);

void bm_drift(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(drift(kParams, kState));
}
BENCHMARK(bm_drift);

void bm_covariance(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(covariance(kParams, kState));
}
BENCHMARK(bm_covariance);

void bm_event_factor(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(event_factor(kParams, kState));
}
BENCHMARK(bm_event_factor);

void bm_cholesky_factor(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cholesky_factor(kParams, kState));
}
BENCHMARK(bm_cholesky_factor);

void bm_philox_block(benchmark::State& state) {
  std::array<std::uint32_t, 4> ctr{0, 0, 0, 0};
  const std::array<std::uint32_t, 2> key{1, 2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(philox4x32(ctr, key));
    ++ctr[0];
  }
}
BENCHMARK(bm_philox_block);

void bm_uniform(benchmark::State& state) {
  RngStream s = derive_stream(1, "bench/uniform", 0);
  for (auto _ : state) benchmark::DoNotOptimize(s.uniform_open01());
}
BENCHMARK(bm_uniform);

void bm_normal(benchmark::State& state) {
  RngStream s = derive_stream(1, "bench/normal", 0);
  for (auto _ : state) benchmark::DoNotOptimize(s.normal());
}
BENCHMARK(bm_normal);

void bm_em_step(benchmark::State& state) {
  const auto kind = static_cast<sde::FactorizationKind>(state.range(0));
  RngStream s = derive_stream(1, "bench/em-step", 0);
  const double sqrt_dt = 0.1;
  std::vector<double> noise(std::size_t(noise_dim(kind)));
  for (auto _ : state) {
    for (double& g : noise) g = s.normal() * sqrt_dt;
    benchmark::DoNotOptimize(sde::em_step(kParams, kState, 1e-2, noise, kind));
  }
}
BENCHMARK(bm_em_step)
    ->Arg(int(sde::FactorizationKind::Event4D))
    ->Arg(int(sde::FactorizationKind::Cholesky2D))
    ->Arg(int(sde::FactorizationKind::Diagonal2D));

}  // namespace
