#include "emprint/catalog.hpp"
#include "emprint/eim.hpp"
#include "emprint/rbm.hpp"

#include <benchmark/benchmark.h>

namespace {

emprint::TrainingSet chirp(std::size_t l) {
  emprint::FamilySpec spec;
  spec.family = emprint::Family::DampedChirp;
  spec.param_range = emprint::default_param_range(spec.family);
  spec.n_params = 101;
  spec.grid = emprint::default_grid(spec.family, l);
  return emprint::generate_family(spec);
}

void BM_GreedyBasis(benchmark::State& state) {
  const auto ts = chirp(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(emprint::build_reduced_basis(ts, 1e-12, 100));
}
BENCHMARK(BM_GreedyBasis)->Arg(1001)->Arg(4001)->Unit(benchmark::kMillisecond);

// Full node selection; the variant criteria scan every grid point per step.
void BM_Interpolant(benchmark::State& state) {
  static const auto rb = emprint::build_reduced_basis(chirp(1001), 1e-12, 100);
  const auto criterion = static_cast<emprint::SelectionCriterion>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(emprint::build_interpolant(rb, criterion, rb.size()));
  state.SetLabel(std::string(emprint::to_string(criterion)));
}
BENCHMARK(BM_Interpolant)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
