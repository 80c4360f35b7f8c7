#include <benchmark/benchmark.h>

#include <cascadex/infer.hpp>
#include <cascadex/likelihood.hpp>
#include <cascadex/simulate.hpp>

using namespace cascadex;

namespace {

struct Fixture {
  SocialGraph g;
  Cascade c;
};

Fixture make(std::size_t n, std::size_t horizon) {
  Fixture f{powerlaw_cluster_graph(n, 3, 0.1, 1), {}};
  SimConfig cfg;
  cfg.model = EndogenousModel::exp(0.05, 0.5);
  cfg.profile = ExogenousProfile::constant(0.004);
  cfg.n_seeds = std::max<std::size_t>(1, n / 200);
  cfg.horizon = horizon;
  cfg.seed = 2;
  f.c = simulate(f.g, cfg).cascade;
  return f;
}

void BM_EvaluatorBuild(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)), 100);
  for (auto _ : state) {
    LikelihoodEvaluator eval(f.g, f.c, {});
    benchmark::DoNotOptimize(eval.horizon());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvaluatorBuild)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_TotalLoglik(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)), 100);
  const LikelihoodEvaluator eval(f.g, f.c, {});
  const std::vector<double> p_ext(eval.horizon(), 0.004);
  const auto model = EndogenousModel::exp(0.05, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(eval.total(model, p_ext));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TotalLoglik)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

// Reference path: masks and per-node probabilities every window.
void BM_TotalLoglikDirect(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)), 100);
  const ExogenousSeries series{std::vector<double>(f.c.horizon(), 0.004)};
  const auto model = EndogenousModel::exp(0.05, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(total_loglik(f.g, f.c, model, series, {}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TotalLoglikDirect)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_Alternate(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)), 50);
  InferenceSettings settings;
  settings.workers = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(alternate(f.g, f.c, ModelKind::SI, settings).loglik);
}
BENCHMARK(BM_Alternate)->Args({100, 1})->Args({1000, 1})->Args({10000, 1})->Args({10000, 4})->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const auto g = powerlaw_cluster_graph(static_cast<std::size_t>(state.range(0)), 3, 0.1, 1);
  SimConfig cfg;
  cfg.model = EndogenousModel::exp(0.05, 0.5);
  cfg.profile = ExogenousProfile::constant(0.004);
  cfg.horizon = 100;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(g, cfg).cascade.n_activated());
}
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
