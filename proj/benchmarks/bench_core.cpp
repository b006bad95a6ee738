#include <benchmark/benchmark.h>

#include "syncgeom/holonomy.hpp"
#include "syncgeom/netgen.hpp"
#include "syncgeom/syncut.hpp"

using namespace syncgeom;

namespace {

SimInstance desk_instance(int n_per_component, int d) {
  SimConfig config;
  config.n_per_component = n_per_component;
  config.d = d;
  config.degree_min = 4;
  config.degree_max = 8;
  config.inter_links_min = n_per_component / 2;
  config.inter_links_max = n_per_component;
  return simulate_network(config, 1234);
}

}  // namespace

static void BM_BuildOperators(benchmark::State& state) {
  const SimInstance inst = desk_instance(static_cast<int>(state.range(0)), 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_operators(inst.graph, inst.rho));
}
BENCHMARK(BM_BuildOperators)->Arg(40)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_SpectralSync(benchmark::State& state) {
  const SimInstance inst = desk_instance(static_cast<int>(state.range(0)), 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(spectral_sync(inst.graph, inst.rho));
}
BENCHMARK(BM_SpectralSync)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_KernelDim(benchmark::State& state) {
  const SimInstance inst = desk_instance(static_cast<int>(state.range(0)), 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernel_dim(inst.graph, inst.rho));
}
BENCHMARK(BM_KernelDim)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_Holonomy(benchmark::State& state) {
  const SimInstance inst = desk_instance(static_cast<int>(state.range(0)), 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(holonomy_generators(inst.graph, inst.rho, 0));
}
BENCHMARK(BM_Holonomy)->Arg(40)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_SynCut(benchmark::State& state) {
  const SimInstance inst = desk_instance(static_cast<int>(state.range(0)), 3);
  SynCutConfig config;
  config.k = 2;
  config.seed = 7;
  for (auto _ : state)
    benchmark::DoNotOptimize(syncut(inst.graph, inst.rho, config));
}
BENCHMARK(BM_SynCut)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
