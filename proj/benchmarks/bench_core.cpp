#include <benchmark/benchmark.h>

#include "nlc/analysis.hpp"
#include "nlc/dynamics.hpp"
#include "nlc/graph.hpp"
#include "nlc/signal.hpp"

namespace {

nlc::Graph er100() {
  nlc::Rng rng(42);
  return nlc::Graph::erdos_renyi(100, 0.1, rng);
}

void BM_VectorField_ER100(benchmark::State& state) {
  const nlc::Graph g = er100();
  const auto s = nlc::SignalFunction::tanh_gain(1.0);
  nlc::Rng rng(7);
  const auto x = nlc::StateVector::uniform_random(g.size(), rng);
  for (auto _ : state) {
    auto f = nlc::vector_field(g, s, x.values());
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_VectorField_ER100);

void BM_Integrate_ER100_T20(benchmark::State& state) {
  const nlc::Graph g = er100();
  const auto s = nlc::SignalFunction::tanh_gain(1.0);
  nlc::Rng rng(7);
  const auto x0 = nlc::StateVector::uniform_random(g.size(), rng);
  for (auto _ : state) {
    auto traj = nlc::integrate(g, s, x0, {.T = 20.0, .h = 0.01});
    benchmark::DoNotOptimize(traj);
  }
}
BENCHMARK(BM_Integrate_ER100_T20);

void BM_SpectralCheck_ER100(benchmark::State& state) {
  const nlc::Graph g = er100();
  for (auto _ : state) {
    auto summary = nlc::spectral_check(g);
    benchmark::DoNotOptimize(summary);
  }
}
BENCHMARK(BM_SpectralCheck_ER100);

void BM_FindFixedPoints_Tanh20(benchmark::State& state) {
  const auto s = nlc::SignalFunction::tanh_gain(20.0);
  for (auto _ : state) {
    auto set = nlc::find_fixed_points(s);
    benchmark::DoNotOptimize(set);
  }
}
BENCHMARK(BM_FindFixedPoints_Tanh20);

void BM_SymmetricPairs_Bipartite(benchmark::State& state) {
  const nlc::Graph g = nlc::Graph::complete_bipartite(40, 60);
  for (auto _ : state) {
    auto pairs = nlc::symmetric_pairs(g);
    benchmark::DoNotOptimize(pairs);
  }
}
BENCHMARK(BM_SymmetricPairs_Bipartite);

}  // namespace

BENCHMARK_MAIN();
