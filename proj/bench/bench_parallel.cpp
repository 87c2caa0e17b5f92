// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "escape/graph.hpp"
#include "escape/kernel.hpp"
#include "escape/walker.hpp"

namespace {

escape::Graph torus(std::size_t side) { return escape::build_graph({escape::Torus{side, 2}, 0}); }

void BM_ApplyParallel(benchmark::State& state) {
  const auto g = torus(static_cast<std::size_t>(state.range(0)));
  const auto k = escape::srw_kernel(g);
  std::vector<double> v(g.size(), 1.0), out(g.size());
  v[0] = 2.0;
  for (auto _ : state) {
    escape::apply(k, v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_ApplySerial(benchmark::State& state) {
  const auto g = torus(static_cast<std::size_t>(state.range(0)));
  const auto k = escape::srw_kernel(g);
  std::vector<double> v(g.size(), 1.0), out(g.size());
  v[0] = 2.0;
  for (auto _ : state) {
    escape::apply_serial(k, v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

escape::WalkConfig walk_config(std::int64_t samples) {
  escape::WalkConfig cfg;
  cfg.t_max = 256;
  cfg.n_samples = static_cast<std::size_t>(samples);
  cfg.seed = 7;
  return cfg;
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto g = torus(128);
  const auto k = escape::srw_kernel(g);
  const auto cfg = walk_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(escape::simulate(k, g, cfg).mean_sq_dist.back());
  state.SetItemsProcessed(state.iterations() * state.range(0) * 256);
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto g = torus(128);
  const auto k = escape::srw_kernel(g);
  const auto cfg = walk_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(escape::simulate_serial(k, g, cfg).mean_sq_dist.back());
  state.SetItemsProcessed(state.iterations() * state.range(0) * 256);
}

}  // namespace

BENCHMARK(BM_ApplyParallel)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_ApplySerial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_SimulateParallel)->Arg(1000)->Arg(10000);
BENCHMARK(BM_SimulateSerial)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
