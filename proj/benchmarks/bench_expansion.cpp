#include <random>

#include <benchmark/benchmark.h>

#include "qfirob/expansion.hpp"

namespace {

using namespace qfirob;

HermitianMatrix random_hermitian(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  return HermitianMatrix(0.5 * (a + a.adjoint()));
}

void run(benchmark::State& state, int order, ContractionRoute route) {
  const Index d = state.range(0);
  std::mt19937_64 rng(11);
  const auto h0 = random_hermitian(d, rng);
  const auto dh = random_hermitian(d, rng);
  std::vector<HermitianMatrix> ops{random_hermitian(d, rng), random_hermitian(d, rng)};
  for (auto _ : state) benchmark::DoNotOptimize(build_expansion(h0, dh, ops, 1.0, order, route));
}

void BM_SecondOrderFactored(benchmark::State& s) { run(s, 2, ContractionRoute::factored); }
void BM_SecondOrderMaterialized(benchmark::State& s) { run(s, 2, ContractionRoute::materialized); }
void BM_ThirdOrder(benchmark::State& s) { run(s, 3, ContractionRoute::factored); }

BENCHMARK(BM_SecondOrderFactored)->Arg(8)->Arg(32)->Arg(128);
BENCHMARK(BM_SecondOrderMaterialized)->Arg(8)->Arg(32);
BENCHMARK(BM_ThirdOrder)->Arg(8)->Arg(32);

}  // namespace
