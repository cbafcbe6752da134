#include <algorithm>
#include <array>
#include <random>

#include <benchmark/benchmark.h>

#include "qfirob/divided_difference.hpp"
#include "qfirob/kernels.hpp"

namespace {

using namespace qfirob;

RVector spread_spectrum(Index d) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  RVector e(d);
  for (Index i = 0; i < d; ++i) e(i) = u(rng);
  std::sort(e.data(), e.data() + d);
  return e;
}

void BM_DividedDifference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::array<Complex, 8> z{};
  for (std::size_t k = 0; k < n; ++k) z[k] = Complex(0.0, 0.37 * static_cast<double>(k * k));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exp_divided_difference(std::span<const Complex>(z.data(), n), 1.3));
  }
}
BENCHMARK(BM_DividedDifference)->DenseRange(1, 4);

void BM_KernelR(benchmark::State& state) {
  const Index d = state.range(0);
  const KernelEvaluator k(spread_spectrum(d), 1.0);
  for (auto _ : state) {
    Complex acc = 0;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) acc += k.R(i, j, (i + 1) % d, (j + 2) % d);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * d * d);
}
BENCHMARK(BM_KernelR)->Arg(8)->Arg(32);

void BM_BuildKernels(benchmark::State& state) {
  const Index d = state.range(0);
  SpectralDecomposition s{spread_spectrum(d), CMatrix::Identity(d, d)};
  for (auto _ : state) benchmark::DoNotOptimize(build_kernels(s, 1.0));
}
BENCHMARK(BM_BuildKernels)->Arg(4)->Arg(8)->Arg(16);

}  // namespace
