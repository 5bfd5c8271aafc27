#include <benchmark/benchmark.h>

#include "npfuse/bounds.hpp"
#include "npfuse/ensemble.hpp"
#include "npfuse/network.hpp"
#include "npfuse/scenario.hpp"

namespace {

const npfuse::SensorArray& paper_array() {
  static const npfuse::SensorArray array(npfuse::preset("paper-sec6"));
  return array;
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto s = npfuse::simulate_ensemble_serial(paper_array(), npfuse::Hypothesis::H1, trials, 7);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EnsembleParallel(benchmark::State& state) {
  const auto trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto s = npfuse::simulate_ensemble_parallel(paper_array(), npfuse::Hypothesis::H1, trials, 7);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PoissonRightTail(benchmark::State& state) {
  const double lambda = 4387.0 / 17.0;
  for (auto _ : state) benchmark::DoNotOptimize(npfuse::poisson_right_tail(lambda, 338));
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PoissonRightTail);

BENCHMARK_MAIN();
