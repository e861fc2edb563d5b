#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rasgd/quantizer.hpp"

namespace {

std::vector<double> random_unit(int dim, std::uint64_t seed) {
  std::vector<double> u(static_cast<std::size_t>(dim));
  auto eng = rasgd::rng::substream(seed, {rasgd::rng::kPopulation});
  rasgd::rng::fill_normal(eng, u);
  double ss = 0.0;
  for (const double x : u) ss += x * x;
  const double inv = 1.0 / std::sqrt(ss);
  for (auto& x : u) x *= inv;
  return u;
}

void BM_ConvexWeights(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const rasgd::CpCodebook cb(dim);
  const auto u = random_unit(dim, 7);
  for (auto _ : state) {
    auto w = rasgd::convex_weights(u, cb);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_ConvexWeights)->Arg(8)->Arg(64)->Arg(512);

void BM_QuantizeWalk(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const rasgd::CpCodebook cb(dim);
  const auto u = random_unit(dim, 7);
  auto eng = rasgd::rng::substream(11, {rasgd::rng::kTrial});
  for (auto _ : state) {
    benchmark::DoNotOptimize(rasgd::quantize(u, cb, eng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QuantizeWalk)->Arg(8)->Arg(64)->Arg(512);

void BM_SamplerDraw(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const rasgd::CpCodebook cb(dim);
  const rasgd::CodewordSampler sampler(random_unit(dim, 7), cb);
  auto eng = rasgd::rng::substream(11, {rasgd::rng::kTrial});
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.sample(eng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SamplerDraw)->Arg(8)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
