#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "karma/wardrop.hpp"

using namespace karma;

namespace {

std::vector<AgentDay> make_agents(long n) {
  const PriceVector p{10, 14};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ref(0.0, 100.0);
  std::uniform_real_distribution<double> karma(0.0, 500.0);
  std::exponential_distribution<double> sens(1.0);
  std::vector<AgentDay> agents(static_cast<std::size_t>(n));
  for (AgentDay& a : agents) {
    a.state.reference = ref(rng);
    a.thresholds = thresholds(a.state.reference, p, 6);
    a.state.karma = std::max(karma(rng), a.thresholds.floor);
    a.state.sensitivity = sens(rng);
    a.travels = true;
  }
  return agents;
}

void run(benchmark::State& state, Execution exec) {
  const auto agents = make_agents(state.range(0));
  std::vector<RouteChoice> choices(agents.size());
  const PolicyContext ctx{{10, 14}, 6, 1.0};
  for (auto _ : state) {
    const FlowVector x = aggregate_best_response(agents, DiscomfortOrder::D1LessD2, ctx, choices, exec);
    benchmark::DoNotOptimize(x);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BestResponseSerial(benchmark::State& s) { run(s, Execution::Serial); }
void BM_BestResponseParallel(benchmark::State& s) { run(s, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_BestResponseSerial)->RangeMultiplier(10)->Range(1'000, 1'000'000);
BENCHMARK(BM_BestResponseParallel)->RangeMultiplier(10)->Range(1'000, 1'000'000);

BENCHMARK_MAIN();
