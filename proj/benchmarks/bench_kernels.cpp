// Throughput of the main kernels. Sizes are chosen to finish in well under
// a second per iteration on one core.

#include <benchmark/benchmark.h>

#include "cpoly/bridge_lab.hpp"
#include "cpoly/ldp_lab.hpp"
#include "cpoly/partition.hpp"
#include "cpoly/single_site.hpp"

namespace {

using namespace cpoly;

void BM_SiteCounterWalk(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int n = 4096;
  Stream stream(1);
  StepSource src(stream, 2 * dim);
  SiteCounter counter(dim, n);
  for (auto _ : state) {
    counter.reset();
    std::int64_t q = 0;
    for (int i = 0; i < n; ++i) q += 2 * counter.step(src.next()) + 1;
    benchmark::DoNotOptimize(q);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SiteCounterWalk)->Arg(2)->Arg(3);

void BM_SingleSiteTable(benchmark::State& state) {
  const ChargeLaw law = state.range(0) == 0 ? ChargeLaw::gaussian() : ChargeLaw::three_point(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SingleSiteTable::build(law, {0.5, 0.1}, 1000).log_value(1000));
  }
}
BENCHMARK(BM_SingleSiteTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ZExact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(z_exact(ChargeLaw::gaussian(), {0.3, 0.2}, 2, n).log_value);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(walk_count(2, n)));
}
BENCHMARK(BM_ZExact)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ZMonteCarlo(benchmark::State& state) {
  McConfig mc;
  mc.samples = 10000;
  mc.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(z_mc(ChargeLaw::gaussian(), {0.5, 0.1}, 2, static_cast<int>(state.range(0)), mc).log_value);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mc.samples) * state.range(0));
}
BENCHMARK(BM_ZMonteCarlo)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ReturnProbabilities(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(return_probabilities(static_cast<int>(state.range(0)), 4096).back());
  }
}
BENCHMARK(BM_ReturnProbabilities)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_QHistogram(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(q_histogram_exact(2, static_cast<int>(state.range(0))).mean());
}
BENCHMARK(BM_QHistogram)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SawCounts(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(saw_counts(2, static_cast<int>(state.range(0))).back());
}
BENCHMARK(BM_SawCounts)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_WsawRosenbluth(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(wsaw_rung_mc(3, state.range(0), 1e-2, {1000, 7, 1}).a_n);
  }
}
BENCHMARK(BM_WsawRosenbluth)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_BridgeExact(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bridge_probability_exact(2, state.range(0)));
}
BENCHMARK(BM_BridgeExact)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
