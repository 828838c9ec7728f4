#include <benchmark/benchmark.h>

#include <omp.h>

#include "chainsim/experiments/runner.hpp"

using namespace chainsim;

namespace {

std::vector<experiments::ScenarioConfig> paired(int replications) {
  std::vector<experiments::ScenarioConfig> out;
  for (auto mode : {sim::SharingMode::NoIS, sim::SharingMode::BIS}) {
    experiments::ScenarioConfig s;
    s.name = std::string(sim::to_string(mode));
    s.sim.mode = mode;
    s.sim.days = 10;
    s.sim.retailers = 8;
    s.sim.items = 10;
    s.replications = replications;
    out.push_back(s);
  }
  return out;
}

void run(benchmark::State& state, experiments::Execution execution) {
  const auto scenarios = paired(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto results = experiments::run_experiments(scenarios, {execution, {}});
    benchmark::DoNotOptimize(results);
  }
  state.counters["threads"] = execution == experiments::Execution::Parallel ? omp_get_max_threads() : 1;
  state.counters["replications/s"] =
      benchmark::Counter(static_cast<double>(2 * state.range(0) * state.iterations()), benchmark::Counter::kIsRate);
}

void BM_Serial(benchmark::State& state) { run(state, experiments::Execution::Serial); }
void BM_Parallel(benchmark::State& state) { run(state, experiments::Execution::Parallel); }

}  // namespace

BENCHMARK(BM_Serial)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
