#include "emprint/numerics.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

emprint::ComplexMatrix random_square(std::size_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> g;
  emprint::ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

void BM_LuFactor(benchmark::State& state) {
  const auto a = random_square(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(emprint::lu_factor(a));
}
BENCHMARK(BM_LuFactor)->RangeMultiplier(2)->Range(4, 64);

void BM_Conditioning(benchmark::State& state) {
  const auto a = random_square(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(emprint::conditioning(a));
}
BENCHMARK(BM_Conditioning)->RangeMultiplier(2)->Range(4, 64);

}  // namespace
