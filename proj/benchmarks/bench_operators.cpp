#include <benchmark/benchmark.h>

#include <random>

#include "schatten/all.hpp"

namespace {

using namespace schatten;

HermitianMatrixField bump_field(const MultiIndexBasis& basis, const TorusGrid& grid) {
  const CMatrix a = polyharmonic_coefficients(basis);
  const std::vector<double> origin(static_cast<std::size_t>(grid.dimension()), 0.0);
  std::vector<CMatrix> s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double r2 = 0.0;
    for (double v : grid.displacement(i, origin)) r2 += v * v;
    s.push_back(a * (1.0 + 0.5 * std::exp(-r2)));
  }
  return HermitianMatrixField::sampled(basis, std::move(s));
}

CVector random_vector(Index size) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  CVector v(size);
  for (Index i = 0; i < size; ++i) v(i) = Complex(d(rng), d(rng));
  return v;
}

// args: N, m, n
void BM_ApplyHVar(benchmark::State& state) {
  const TorusGrid grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(2)), 8.0);
  const auto basis = enumerate_basis(grid.dimension(), static_cast<int>(state.range(1)));
  const auto H = assemble_H_var(bump_field(basis, grid), grid);
  const CVector u = random_vector(static_cast<Index>(grid.size()));
  for (auto _ : state) benchmark::DoNotOptimize(H.apply(u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_ApplyHVar)->Args({1, 1, 1024})->Args({1, 2, 1024})->Args({2, 1, 64})->Args({3, 1, 16});

void BM_ApplyF(benchmark::State& state) {
  const TorusGrid grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(2)), 8.0);
  const auto basis = enumerate_basis(grid.dimension(), static_cast<int>(state.range(1)));
  const auto F = assemble_F(sqrt_field(bump_field(basis, grid)), grid);
  const CVector u = random_vector(static_cast<Index>(basis.size() * grid.size()));
  for (auto _ : state) benchmark::DoNotOptimize(F.apply(u));
}
BENCHMARK(BM_ApplyF)->Args({1, 1, 1024})->Args({2, 1, 64})->Args({2, 2, 32});

void BM_MaterializeHVar(benchmark::State& state) {
  const TorusGrid grid(1, static_cast<int>(state.range(0)), 8.0);
  const auto basis = enumerate_basis(1, 1);
  const auto H = assemble_H_var(bump_field(basis, grid), grid);
  for (auto _ : state) benchmark::DoNotOptimize(materialize(H));
}
BENCHMARK(BM_MaterializeHVar)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

}  // namespace
