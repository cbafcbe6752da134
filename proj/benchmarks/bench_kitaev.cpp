#include <benchmark/benchmark.h>

#include "qfirob/kitaev.hpp"

namespace {

using namespace qfirob;

void BM_KitaevReport(benchmark::State& state) {
  const auto p = KitaevParams::uniform(static_cast<int>(state.range(0)), 2.0, -1.0, -1.0, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(kitaev_robustness(p));
}
BENCHMARK(BM_KitaevReport)->Arg(6)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_KitaevRealization(benchmark::State& state) {
  const auto p = KitaevParams::uniform(static_cast<int>(state.range(0)), 2.0, -1.0, -1.0, 1.0, 1.0);
  const KitaevQfiModel model(p);
  RVector deltas = RVector::Constant(2 * (p.n_sites - 1), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(model.qfi(deltas));
}
BENCHMARK(BM_KitaevRealization)->Arg(6)->Arg(20);

}  // namespace
