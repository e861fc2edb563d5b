#include <benchmark/benchmark.h>

#include "rasgd/analysis.hpp"

namespace {

void run_upload(benchmark::State& state, rasgd::Scheme scheme) {
  rasgd::MseScenario scenario;
  scenario.scheme = scheme;
  scenario.devices = static_cast<int>(state.range(0));
  scenario.dim = 80;
  scenario.parts = 10;
  scenario.antennas = 100;
  const rasgd::FrozenPopulation pop = rasgd::freeze_population(scenario, 11);
  rasgd::RausSimulator sim(scheme, pop.layout, scenario.devices, scenario.total_p, scenario.n0,
                           scenario.sigma2, scenario.antennas);
  const auto access = [&pop](int k, int d) { return pop.view(k, d); };
  std::uint64_t round = 0;
  for (auto _ : state) {
    const auto& est = sim.round(11, round++, access);
    benchmark::DoNotOptimize(est.g_hat.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_NoncoherentUpload(benchmark::State& state) {
  run_upload(state, rasgd::Scheme::RausNoncoherent);
}
BENCHMARK(BM_NoncoherentUpload)->Arg(100)->Arg(500);

void BM_AsymptoticUpload(benchmark::State& state) {
  run_upload(state, rasgd::Scheme::RausAsymptotic);
}
BENCHMARK(BM_AsymptoticUpload)->Arg(100)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
