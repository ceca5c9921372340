#include <benchmark/benchmark.h>

#include <random>

#include "schatten/all.hpp"

namespace {

using namespace schatten;

CMatrix random_matrix(Index n) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  CMatrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
  return m;
}

void BM_SchattenNorm(benchmark::State& state) {
  const CMatrix m = random_matrix(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(schatten_norm(m, 4.0));
}
BENCHMARK(BM_SchattenNorm)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_DeiftResidual(benchmark::State& state) {
  const CMatrix m = random_matrix(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(deift_residual(m));
}
BENCHMARK(BM_DeiftResidual)->RangeMultiplier(2)->Range(64, 256)->Unit(benchmark::kMillisecond);

void BM_WeightedGNorm(benchmark::State& state) {
  const WeightedNormSpec spec{static_cast<double>(state.range(0)), 2, 1};
  const Profile g = Profile::canonical();
  for (auto _ : state) benchmark::DoNotOptimize(weighted_g_norm(g, spec));
}
BENCHMARK(BM_WeightedGNorm)->Arg(3)->Arg(4)->Arg(8);

void BM_SublevelVolume(benchmark::State& state) {
  const auto basis = enumerate_basis(2, 2);
  const CMatrix b = matrix_sqrt(polyharmonic_coefficients(basis));
  for (auto _ : state) benchmark::DoNotOptimize(sublevel_volume(b, basis, static_cast<std::uint64_t>(state.range(0)), 7));
}
BENCHMARK(BM_SublevelVolume)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_ImpurityExperiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  cfg.perturbation.kind = RegionKind::kBox;
  cfg.perturbation.half_width = {1.0};
  cfg.perturbation.amplitude_scale = 0.5;
  cfg.p_values = {4.0, 6.0, 8.0};
  for (auto _ : state) benchmark::DoNotOptimize(impurity_experiment(cfg));
}
BENCHMARK(BM_ImpurityExperiment)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
