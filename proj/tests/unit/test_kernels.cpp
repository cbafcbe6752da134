#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qfirob/error.hpp"
#include "qfirob/kernels.hpp"

namespace qfirob {
namespace {

using oracle::Rng;

SpectralDecomposition diagonal_spectrum(const RVector& e) {
  return eigh(HermitianMatrix::diagonal(e));
}

// Reference entries from nested phase integrals, each read off the exponential
// of a bidiagonal matrix at nodes 0, i w_0, i (w_0 + w_1), ...
Complex nested(std::initializer_list<double> w, double t) {
  std::vector<Complex> z{0.0};
  double acc = 0;
  for (double x : w) {
    acc += x;
    z.emplace_back(0.0, acc);
  }
  return oracle::bidiagonal_divided_difference(z, t);
}

Complex ref_S(const RVector& e, Index i, Index j, Index k, double t) {
  return kI * nested({e(k) - e(j), e(i) - e(k)}, t);
}
Complex ref_R(const RVector& e, Index i, Index j, Index k, Index l, double t) {
  return -nested({e(l) - e(j), e(k) - e(l), e(i) - e(k)}, t);
}
Complex ref_Rbar(const RVector& e, Index i, Index j, Index k, Index l, double t) {
  const double wkl = e(k) - e(l), wik = e(i) - e(k), wlj = e(l) - e(j);
  return std::conj(nested({wkl, wik, wlj}, t) + nested({wkl, wlj, wik}, t));
}

TEST(Kernels, FullyDegenerateSpectrumValues) {
  const double t = 1.3;
  const auto k = build_kernels(diagonal_spectrum(RVector::Constant(3, 0.4)), t);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      EXPECT_LT(std::abs(k.T(i, j) - t), 1e-15);
      for (Index l = 0; l < 3; ++l) {
        EXPECT_LT(std::abs(k.s(i, j, l) - kI * t * t / 2.0), 1e-15);
        for (Index m = 0; m < 3; ++m) {
          EXPECT_LT(std::abs(k.r(i, j, l, m) + t * t * t / 6.0), 1e-15);
          EXPECT_LT(std::abs(k.rbar(i, j, l, m) - t * t * t / 3.0), 1e-15);
        }
      }
    }
  }
}

TEST(Kernels, TwoLevelTMatchesQuadrature) {
  const double h = 1.7, t = 0.9;
  RVector e(2);
  e << -h, h;
  const auto k = build_kernels(diagonal_spectrum(e), t);
  const double w = e(0) - e(1);
  const int n = 10000;
  Complex sum = 0.0;
  for (int m = 0; m <= n; ++m) {
    const double weight = (m == 0 || m == n) ? 1.0 : (m % 2 ? 4.0 : 2.0);
    sum += weight * std::exp(kI * w * (t * m / n));
  }
  sum *= t / n / 3.0;
  EXPECT_LT(std::abs(k.T(0, 1) - sum), 1e-10);
}

TEST(Kernels, VanishAtZeroTime) {
  Rng rng(1);
  const auto k = build_kernels(diagonal_spectrum(oracle::separated_spectrum(4, rng, 0.2, 1.0)), 0.0);
  EXPECT_EQ(k.T.norm(), 0.0);
  for (const auto& v : {k.S, k.R, k.Rbar}) {
    for (Complex c : v) ASSERT_EQ(std::abs(c), 0.0);
  }
}

TEST(Kernels, ShrinkWithTime) {
  Rng rng(2);
  const auto spec = diagonal_spectrum(oracle::separated_spectrum(4, rng, 0.2, 1.0));
  const double t = 1e-4;
  const auto k = build_kernels(spec, t);
  EXPECT_LT(k.T.cwiseAbs().maxCoeff(), 1.01 * t);
  for (Complex c : k.S) ASSERT_LT(std::abs(c), t * t);
  for (Complex c : k.Rbar) ASSERT_LT(std::abs(c), t * t * t);
}

TEST(Kernels, SymmetriesOnRandomSpectra) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 2 + trial % 5;
    RVector e = oracle::separated_spectrum(d, rng, 1e-3, 2.0);
    if (trial % 3 == 0) e(1) = e(0);  // exercise coincident branches too
    std::sort(e.data(), e.data() + d);
    const auto k = build_kernels(diagonal_spectrum(e), 0.5 + 0.1 * trial);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        ASSERT_LT(std::abs(k.T(j, i) - std::conj(k.T(i, j))), 1e-12);
        for (Index l = 0; l < d; ++l) {
          ASSERT_LT(std::abs(k.s(i, j, l) - k.s(l, j, i)), 1e-12);
        }
      }
    }
  }
}

// Every coincidence pattern of (i, j, k, l): the closed forms, the divided
// difference fallback and the oracle must agree.
TEST(Kernels, AllBranchesMatchNestedIntegrals) {
  Rng rng(4);
  for (double t : {0.3, 1.0, 4.0}) {
    for (int layout = 0; layout < 3; ++layout) {
      RVector e(4);
      if (layout == 0) e << -1.1, 0.2, 0.9, 2.5;      // separated
      if (layout == 1) e << -1.1, -1.1, 0.9, 0.9;     // exact pairs
      if (layout == 2) e << -1.1, -1.1 + 1e-6, 0.9, 0.9 + 0.05;  // near pairs
      KernelEvaluator ev(e, t);
      KernelEvaluator raw(e, t, 0.0);
      for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 4; ++j) {
          for (Index k = 0; k < 4; ++k) {
            const Complex s = ref_S(e, i, j, k, t);
            ASSERT_LT(std::abs(ev.S(i, j, k) - s), 1e-12 * (1 + std::abs(s)));
            for (Index l = 0; l < 4; ++l) {
              const Complex r = ref_R(e, i, j, k, l, t);
              const Complex rb = ref_Rbar(e, i, j, k, l, t);
              ASSERT_LT(std::abs(ev.R(i, j, k, l) - r), 1e-11 * (1 + std::abs(r)))
                  << layout << ' ' << i << j << k << l;
              ASSERT_LT(std::abs(ev.Rbar(i, j, k, l) - rb), 1e-11 * (1 + std::abs(rb)))
                  << layout << ' ' << i << j << k << l;
              if (layout == 0) {
                // Well separated: the unguarded closed forms are accurate too.
                ASSERT_LT(std::abs(raw.R(i, j, k, l) - r), 1e-10 * (1 + std::abs(r)));
                ASSERT_LT(std::abs(raw.Rbar(i, j, k, l) - rb), 1e-10 * (1 + std::abs(rb)));
              }
            }
          }
        }
      }
    }
  }
}

TEST(Kernels, GuardRepairsNearlyDegenerateGaps) {
  RVector e(3);
  e << 0.0, 1e-7, 1.0;
  const double t = 1.0;
  KernelEvaluator guarded(e, t);
  KernelEvaluator raw(e, t, 0.0);
  const Complex want = ref_R(e, 0, 1, 0, 1, t);
  EXPECT_LT(std::abs(guarded.R(0, 1, 0, 1) - want), 1e-13);
  // The printed quotient loses most of its digits here.
  EXPECT_GT(std::abs(raw.R(0, 1, 0, 1) - want), 1e-10);
}

TEST(Kernels, MaterializedTensorsMatchEvaluator) {
  Rng rng(5);
  const auto spec = diagonal_spectrum(oracle::separated_spectrum(5, rng, 0.1, 1.0));
  const double t = 1.2;
  const auto k = build_kernels(spec, t);
  KernelEvaluator ev(spec.eigenvalues, t);
  EXPECT_EQ(k.dim, 5);
  EXPECT_EQ(k.time, t);
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      EXPECT_EQ(k.T(i, j), ev.T(i, j));
      for (Index l = 0; l < 5; ++l) {
        EXPECT_EQ(k.s(i, j, l), ev.S(i, j, l));
        EXPECT_EQ(k.r(i, j, l, 2), ev.R(i, j, l, 2));
        EXPECT_EQ(k.rbar(i, 4, j, l), ev.Rbar(i, 4, j, l));
      }
    }
  }
}

TEST(Kernels, RefusesToMaterializeLargeSpectra) {
  try {
    (void)build_kernels(diagonal_spectrum(RVector::LinSpaced(kMaxMaterializedDim + 1, 0, 1)), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
}

}  // namespace
}  // namespace qfirob
