#include "spreadcast/learners.hpp"
#include "spreadcast/random.hpp"
#include "spreadcast/stacking.hpp"

#include <benchmark/benchmark.h>

using namespace spreadcast;
using learners::LearnerKind;
using learners::RegressorSpec;

namespace {

struct Problem {
  Matrix x;
  Vector y;
};

Problem problem(Index n, Index d) {
  Rng rng(7);
  Problem p{Matrix(n, d), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) p.x(i, j) = rng.normal();
    p.y[i] = std::tanh(p.x(i, 0)) + 0.5 * p.x(i, 1) * p.x(i, 1) + 0.1 * rng.normal();
  }
  return p;
}

void fit_kind(benchmark::State& state, LearnerKind kind, std::map<std::string, std::string> overrides = {}) {
  const auto p = problem(state.range(0), 21);
  const auto spec = RegressorSpec::defaults(kind).with(overrides);
  for (auto _ : state) benchmark::DoNotOptimize(learners::fit(spec, p.x, p.y));
  state.SetComplexityN(state.range(0));
}

void BM_FitOls(benchmark::State& state) { fit_kind(state, LearnerKind::Ols); }
void BM_FitKnn(benchmark::State& state) { fit_kind(state, LearnerKind::Knn); }
void BM_FitKernelRidge(benchmark::State& state) { fit_kind(state, LearnerKind::KernelRidge); }
void BM_FitRandomForest(benchmark::State& state) { fit_kind(state, LearnerKind::RandomForest); }
void BM_FitMlp(benchmark::State& state) { fit_kind(state, LearnerKind::Mlp, {{"epochs", "50"}}); }

BENCHMARK(BM_FitOls)->Arg(100)->Arg(400);
BENCHMARK(BM_FitKnn)->Arg(100)->Arg(400);
BENCHMARK(BM_FitKernelRidge)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitRandomForest)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitMlp)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_PredictKnn(benchmark::State& state) {
  const auto p = problem(400, 21);
  const auto q = problem(state.range(0), 21);
  const auto m = learners::fit(RegressorSpec::defaults(LearnerKind::Knn), p.x, p.y);
  for (auto _ : state) benchmark::DoNotOptimize(m.predict(q.x));
}
BENCHMARK(BM_PredictKnn)->Arg(1)->Arg(180);

void BM_FitStacked(benchmark::State& state) {
  const auto p = problem(400, 21);
  const auto mode = state.range(0) == 0 ? stacking::StackingMode::InSample : stacking::StackingMode::KFold;
  auto base = stacking::default_base_specs();
  base[0] = base[0].with({{"epochs", "50"}});
  for (auto _ : state)
    benchmark::DoNotOptimize(stacking::fit_stacked(base, stacking::default_meta_spec(), p.x, p.y, mode));
  state.SetLabel(std::string(stacking::to_string(mode)));
}
BENCHMARK(BM_FitStacked)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
