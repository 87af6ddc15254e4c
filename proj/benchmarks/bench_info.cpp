#include "spreadcast/info_select.hpp"
#include "spreadcast/random.hpp"
#include "spreadcast/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace spreadcast;

namespace {

void BM_MutualInformation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = 0.5 * x[i] + rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(info::mutual_information(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MutualInformation)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

void BM_RankFeatures(benchmark::State& state) {
  synthetic::SyntheticConfig c;
  c.d = state.range(0);
  const auto ds = synthetic::generate_synthetic(c);
  for (auto _ : state) benchmark::DoNotOptimize(info::rank_features(ds));
}
BENCHMARK(BM_RankFeatures)->Arg(40)->Arg(200);

}  // namespace
