#include <benchmark/benchmark.h>

#include "modclust/modclust.hpp"

using namespace modclust;

namespace {

const SimulatedDataset& numeric_data() {
  static const auto data = simulate(builtin_preset("circles"), 1);
  return data;
}

const SimulatedDataset& categorical_data() {
  static const auto data = simulate(builtin_preset("tables"), 1);
  return data;
}

FitConfig config(int c, double gamma, double p, int restarts) {
  FitConfig cfg;
  cfg.n_clusters = c;
  cfg.gamma = gamma;
  cfg.entropy_weight = p;
  cfg.n_restarts = restarts;
  return cfg;
}

void BM_ModularityMatrix(benchmark::State& state) {
  const auto& a = numeric_data().adjacency;
  for (auto _ : state) benchmark::DoNotOptimize(build_modularity_matrix(a));
}
BENCHMARK(BM_ModularityMatrix);

void BM_FitMedoids(benchmark::State& state) {
  const auto& d = numeric_data();
  const auto& x = std::get<NumericAttributeMatrix>(d.attributes);
  const auto b = build_modularity_matrix(d.adjacency);
  const auto cfg = config(static_cast<int>(state.range(0)), 0.25, 0.5, 50);
  for (auto _ : state) benchmark::DoNotOptimize(fit_fcmd_msc(x, b, cfg, 1));
}
BENCHMARK(BM_FitMedoids)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_FitModes(benchmark::State& state) {
  const auto& d = categorical_data();
  const auto& x = std::get<CategoricalAttributeMatrix>(d.attributes);
  const auto b = build_modularity_matrix(d.adjacency);
  const auto cfg = config(static_cast<int>(state.range(0)), 0.3, 0.2, 50);
  for (auto _ : state) benchmark::DoNotOptimize(fit_fcmo_msc(x, b, cfg, 1));
}
BENCHMARK(BM_FitModes)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_FitMedoidsPenalty(benchmark::State& state) {
  const auto& d = numeric_data();
  PenaltyConfig cfg;
  cfg.n_clusters = 3;
  cfg.beta = 0.5;
  cfg.entropy_weight = 0.5;
  cfg.n_restarts = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_fcmd_penalty(std::get<NumericAttributeMatrix>(d.attributes), d.adjacency, cfg, 1));
  }
}
BENCHMARK(BM_FitMedoidsPenalty)->Unit(benchmark::kMillisecond);

void BM_GridMedoids(benchmark::State& state) {
  const auto& d = numeric_data();
  GridSpec spec;
  spec.c_values = {2, 3, 4, 5};
  for (int i = 0; i <= 12; ++i) spec.gamma_values.push_back(i * 5 / 100.0);
  spec.entropy_weight = 0.5;
  spec.n_restarts = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_search(std::get<NumericAttributeMatrix>(d.attributes), d.adjacency, spec, 1));
  }
}
BENCHMARK(BM_GridMedoids)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
