// Serial reference vs OpenMP kernel for the ZF Monte-Carlo expectations.

#include <benchmark/benchmark.h>

#include "cfmimo/propagation.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/zf_statistics.hpp"

namespace {

cfmimo::MmseStats make_stats(std::size_t m, std::size_t k) {
  const cfmimo::Topology topo = cfmimo::generate_topology(m, k, 1.0, 42);
  cfmimo::Rng rng = cfmimo::make_stream(42, 1);
  const cfmimo::BetaMatrix beta = cfmimo::large_scale_fading(topo, 8.0, cfmimo::kDefaultMinDistanceKm, rng);
  return cfmimo::mmse_stats(beta, 0.1 / cfmimo::noise_power_watts(20e6, 9.0), k);
}

void BM_Parallel(benchmark::State& state) {
  const auto stats = make_stats(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cfmimo::estimate_zf_statistics(stats, 256, 7));
  }
}

void BM_Reference(benchmark::State& state) {
  const auto stats = make_stats(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cfmimo::reference::estimate_zf_statistics(stats, 256, 7));
  }
}

}  // namespace

BENCHMARK(BM_Parallel)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Reference)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
