#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qfirob/error.hpp"
#include "qfirob/expansion.hpp"
#include "qfirob/qfi.hpp"
#include "qfirob/single_qubit.hpp"

namespace qfirob {
namespace {

using oracle::Rng;

struct RandomProbe {
  CMatrix h0, d, n;
  CVector psi;
  double t;
};

// Spectrum layouts that hit every branch of the contractions.
enum class Layout { generic, exact_pairs, near_pairs, flat };

RandomProbe random_probe(Index dim, Layout layout, Rng& rng, double t = 1.1) {
  RVector e = oracle::separated_spectrum(dim, rng, 0.05, 1.0);
  switch (layout) {
    case Layout::exact_pairs:
      for (Index k = 1; k < dim; k += 2) e(k) = e(k - 1);
      break;
    case Layout::near_pairs:
      for (Index k = 1; k < dim; k += 2) e(k) = e(k - 1) + 1e-6 * (1 + k);
      break;
    case Layout::flat:
      e.setConstant(0.3);
      break;
    case Layout::generic:
      break;
  }
  const CMatrix u = oracle::taylor_expm(kI * oracle::random_hermitian(dim, rng));
  RandomProbe p;
  p.h0 = u * e.cast<Complex>().asDiagonal() * u.adjoint();
  p.h0 = 0.5 * (p.h0 + p.h0.adjoint()).eval();
  p.d = oracle::random_hermitian(dim, rng);
  p.n = oracle::random_hermitian(dim, rng);
  p.psi = oracle::random_state(dim, rng);
  p.t = t;
  return p;
}

ExpansionTerms expand(const RandomProbe& p, int order,
                      ContractionRoute route = ContractionRoute::factored) {
  const std::vector<HermitianMatrix> ops{HermitianMatrix(p.n)};
  return build_expansion(HermitianMatrix(p.h0), HermitianMatrix(p.d), ops, p.t, order, route);
}

double variance_at(const RandomProbe& p, double a) {
  const auto g = qfig_exact(HermitianMatrix(p.h0 + a * p.n), HermitianMatrix(p.d), p.t);
  return variance(g.generator, PureState(p.psi));
}

double rel(const CMatrix& got, const CMatrix& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

TEST(Expansion, ZerothOrderIsCleanGenerator) {
  Rng rng(1);
  const auto p = random_probe(6, Layout::generic, rng);
  const auto terms = expand(p, 2);
  const auto g = qfig_exact(HermitianMatrix(p.h0), HermitianMatrix(p.d), p.t);
  EXPECT_LT(rel(terms.g0.matrix(), g.generator.matrix()), 1e-12);
  EXPECT_EQ(terms.time, p.t);
  EXPECT_EQ(terms.term_count(), 1u);
  EXPECT_FALSE(terms.g3.has_value());
}

class ExpansionOracle : public ::testing::TestWithParam<Layout> {};

TEST_P(ExpansionOracle, CoefficientsMatchBlockExponential) {
  Rng rng(100 + static_cast<int>(GetParam()));
  for (Index dim : {2, 3, 5, 8}) {
    for (double t : {0.4, 1.3, 3.0}) {
      const auto p = random_probe(dim, GetParam(), rng, t);
      const auto ref = oracle::generator_coefficients(p.h0, p.d, p.n, p.t, 3);
      for (auto route : {ContractionRoute::factored, ContractionRoute::materialized}) {
        const auto terms = expand(p, 3, route);
        EXPECT_LT(rel(terms.g1[0].matrix(), ref[1]), 1e-10) << dim << ' ' << t;
        EXPECT_LT(rel(terms.g2[0].matrix(), ref[2]), 1e-10) << dim << ' ' << t;
        EXPECT_LT(rel((*terms.g3)[0], ref[3]), 1e-10) << dim << ' ' << t;
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Layouts, ExpansionOracle,
                         ::testing::Values(Layout::generic, Layout::exact_pairs,
                                           Layout::near_pairs, Layout::flat));

TEST(Expansion, OrderByOrderHermiticity) {
  Rng rng(2);
  for (auto layout : {Layout::generic, Layout::exact_pairs, Layout::near_pairs}) {
    const auto p = random_probe(7, layout, rng);
    const auto terms = expand(p, 3);
    // The stored operators are Hermitian by construction; the raw contraction
    // must already be Hermitian before that projection.
    const auto s = eigh(HermitianMatrix(p.h0));
    const CMatrix d = s.to_eigenbasis(p.d), n = s.to_eigenbasis(p.n);
    for (int order = 1; order <= 3; ++order) {
      EXPECT_LT(hermiticity_defect(dyson_coefficient_eigen(s.eigenvalues, d, n, p.t, order)), 1e-9);
    }
    EXPECT_LT(hermiticity_defect((*terms.g3)[0]), 1e-9);
  }
}

TEST(Expansion, DysonCoefficientsAgreeWithKernelContractions) {
  Rng rng(3);
  const auto p = random_probe(6, Layout::generic, rng);
  const auto terms = expand(p, 2);
  const auto s = eigh(HermitianMatrix(p.h0));
  const CMatrix d = s.to_eigenbasis(p.d), n = s.to_eigenbasis(p.n);
  EXPECT_LT(rel(s.from_eigenbasis(dyson_coefficient_eigen(s.eigenvalues, d, n, p.t, 1)),
                terms.g1[0].matrix()), 1e-11);
  EXPECT_LT(rel(s.from_eigenbasis(dyson_coefficient_eigen(s.eigenvalues, d, n, p.t, 2)),
                terms.g2[0].matrix()), 1e-11);
  EXPECT_THROW((void)dyson_coefficient_eigen(s.eigenvalues, d, n, p.t, 4), Error);
}

TEST(Expansion, ThirdOrderRoutesAgree) {
  Rng rng(41);
  for (auto layout : {Layout::generic, Layout::exact_pairs, Layout::near_pairs}) {
    const auto p = random_probe(14, layout, rng, 2.1);
    const auto f = expand(p, 3, ContractionRoute::factored);
    const auto m = expand(p, 3, ContractionRoute::materialized);
    EXPECT_LT(rel((*f.g3)[0], (*m.g3)[0]), 1e-10);
  }
}

TEST(Expansion, RoutesAgreeAtModerateDimension) {
  Rng rng(4);
  const auto p = random_probe(24, Layout::near_pairs, rng);
  const auto f = expand(p, 2, ContractionRoute::factored);
  const auto m = expand(p, 2, ContractionRoute::materialized);
  EXPECT_LT(rel(f.g1[0].matrix(), m.g1[0].matrix()), 1e-11);
  EXPECT_LT(rel(f.g2[0].matrix(), m.g2[0].matrix()), 1e-11);
}

TEST(Expansion, CommutingOperatorsGiveNoFirstOrder) {
  Rng rng(5);
  const CMatrix u = oracle::taylor_expm(kI * oracle::random_hermitian(5, rng));
  auto diag = [&](const RVector& v) -> CMatrix {
    return u * v.cast<Complex>().asDiagonal() * u.adjoint();
  };
  RandomProbe p{diag(RVector::Random(5)), diag(RVector::Random(5)), diag(RVector::Random(5)),
                oracle::random_state(5, rng), 1.0};
  const auto terms = expand(p, 3);
  EXPECT_LT(terms.g1[0].matrix().norm(), 1e-12);
  EXPECT_LT(terms.g2[0].matrix().norm(), 1e-12);
}

TEST(Expansion, RejectsBadArguments) {
  Rng rng(6);
  const auto p = random_probe(3, Layout::generic, rng);
  EXPECT_THROW((void)expand(p, 4), Error);
  const std::vector<HermitianMatrix> bad{HermitianMatrix::identity(4)};
  EXPECT_THROW((void)build_expansion(HermitianMatrix(p.h0), HermitianMatrix(p.d), bad, 1.0, 2),
               Error);
}

// Variance of G(a) = G0 + a G1 + a^2 G2 + ... in powers of a.
TEST(TildeCoefficients, MatchVarianceSeries) {
  Rng rng(7);
  for (auto layout : {Layout::generic, Layout::exact_pairs}) {
    const auto p = random_probe(6, layout, rng);
    const auto terms = expand(p, 3);
    const auto ref = oracle::variance_coefficients(
        oracle::generator_coefficients(p.h0, p.d, p.n, p.t, 3), p.psi);
    const PureStateFunctional f{PureState(p.psi)};
    EXPECT_NEAR(tilde_g1(terms, f, 0), ref[1], 1e-10 * (1 + std::abs(ref[1])));
    EXPECT_NEAR(tilde_g2(terms, f, 0), ref[2], 1e-10 * (1 + std::abs(ref[2])));
    EXPECT_NEAR(tilde_g3(terms, f, 0), ref[3], 1e-10 * (1 + std::abs(ref[3])));
  }
}

TEST(TildeCoefficients, SecondOrderMatchesRichardsonDifference) {
  Rng rng(8);
  const auto p = random_probe(5, Layout::generic, rng);
  const auto terms = expand(p, 2);
  auto second = [&](double h) {
    return (variance_at(p, h) + variance_at(p, -h) - 2.0 * variance_at(p, 0.0)) / (2.0 * h * h);
  };
  const double h = 1e-2;
  const double richardson = (4.0 * second(h / 2) - second(h)) / 3.0;
  EXPECT_NEAR(tilde_g2(terms, PureState(p.psi), 0), richardson,
              1e-6 * (1 + std::abs(richardson)));
}

TEST(TildeCoefficients, ZeroExpansionGivesZero) {
  ExpansionTerms terms;
  terms.g0 = HermitianMatrix::zero(3);
  terms.g1 = {HermitianMatrix::zero(3)};
  terms.g2 = {HermitianMatrix::zero(3)};
  EXPECT_EQ(tilde_g2(terms, PureState::basis_state(3, 1), 0), 0.0);
  EXPECT_THROW((void)tilde_g2(terms, PureState::basis_state(3, 1), 1), Error);
  EXPECT_THROW((void)tilde_g3(terms, PureStateFunctional(PureState::basis_state(3, 1)), 0),
               Error);
}

TEST(TildeCoefficients, LongitudinalQubitTermVanishes) {
  const auto spec = single_qubit_spec({4.0, 1.0, 0.3}, FieldDisorder{0.1, 0.1, 0.1});
  const auto terms = build_expansion(spec, 2);
  EXPECT_NEAR(tilde_g2(terms, spec.initial_state(), 2), 0.0, 1e-14);
}

// |4 Var G_exact(a) - (F0 + 4 a G~1 + 4 a^2 G~2)| = O(a^3).
TEST(TaylorRemainder, CubicScalingOnRandomProbe) {
  Rng rng(9);
  for (auto layout : {Layout::generic, Layout::near_pairs}) {
    const auto p = random_probe(6, layout, rng);
    const auto terms = expand(p, 2);
    const PureStateFunctional f{PureState(p.psi)};
    const double f0 = 4.0 * variance_at(p, 0.0);
    const double v1 = tilde_g1(terms, f, 0), v2 = tilde_g2(terms, f, 0);
    std::vector<double> as, errs;
    for (int k = 0; k <= 8; ++k) {
      const double a = 1e-3 * std::pow(10.0, k / 8.0);
      as.push_back(a);
      errs.push_back(4.0 * variance_at(p, a) - (f0 + 4.0 * a * v1 + 4.0 * a * a * v2));
    }
    EXPECT_NEAR(oracle::loglog_slope(as, errs), 3.0, 0.1);
  }
}

TEST(RobustnessReport, SingleQubitSigmaMax) {
  for (auto [h, expected] : {std::pair{4.0, 2.426}, std::pair{10.0, 5.866}}) {
    const auto spec = single_qubit_spec({h, 1.0, 0.0}, FieldDisorder{1.0, 1.0, 0.0});
    const auto r = robustness_report(spec);
    ASSERT_EQ(r.classification, ProbeClass::DSP);
    ASSERT_TRUE(r.sigma_max.has_value());
    EXPECT_NEAR(*r.sigma_max, expected, 0.005 * expected) << h;
    EXPECT_NEAR(r.f0, 4.0, 1e-13);
  }
}

TEST(RobustnessReport, SingleQubitFrozenValues) {
  const auto r = robustness_report(single_qubit_spec({4.0, 1.0, 0.0}, FieldDisorder{1, 1, 1}));
  EXPECT_NEAR(*r.sigma_max, 2.426755802542555, 1e-12);
  EXPECT_EQ(r.c2_per_term[2], 0.0);
}

TEST(RobustnessReport, LongitudinalDisorderIsImmune) {
  for (double beta : {0.0, 0.4, 2.0}) {
    const auto full = single_qubit_spec({4.0, 1.0, beta}, FieldDisorder{0, 0, 0.3});
    const DisorderedProbeSpec z_only(full.h_theta(), full.dtheta_h(), full.clean_rest(),
                                     {full.disorder_terms()[2]}, full.encoding_time(),
                                     full.initial_state());
    const auto r = robustness_report(z_only);
    EXPECT_EQ(r.classification, ProbeClass::DIP);
    EXPECT_FALSE(r.sigma_max.has_value());
    EXPECT_LT(std::abs(r.c2_per_term[0]), 1e-10);
  }
}

TEST(RobustnessReport, SigmaMaxPresentExactlyForDsp) {
  Rng rng(10);
  int seen_dsp = 0, seen_dep = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_probe(4, Layout::generic, rng);
    const DisorderedProbeSpec spec(HermitianMatrix(p.h0), HermitianMatrix(p.d),
                                   HermitianMatrix::zero(4),
                                   {{HermitianMatrix(p.n), DisorderDistribution::gaussian(0, 0.1), "n"}},
                                   p.t, PureState(p.psi));
    const auto r = robustness_report(spec, 3);
    EXPECT_EQ(r.sigma_max.has_value(), r.classification == ProbeClass::DSP);
    if (r.sigma_max) {
      ++seen_dsp;
      EXPECT_DOUBLE_EQ(*r.sigma_max, 1.0 / std::sqrt(-r.c2_total));
    } else {
      ++seen_dep;
      EXPECT_GT(r.c2_total, 0.0);
    }
    ASSERT_TRUE(r.c3_total && r.c32);
    EXPECT_DOUBLE_EQ(*r.c32, *r.c3_total / r.c2_total);
  }
  EXPECT_GT(seen_dsp, 0);
  EXPECT_GT(seen_dep, 0);
}

TEST(RobustnessReport, ZeroCleanQfiIsAnError) {
  const DisorderedProbeSpec spec(pauli_z(), pauli_z(), HermitianMatrix::zero(2),
                                 {{pauli_x(), DisorderDistribution::gaussian(0, 1), "x"}}, 1.0,
                                 PureState::basis_state(2, 0));
  try {
    (void)robustness_report(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroCleanQfi);
  }
}

TEST(PredictedMarker, QuadraticInSigma) {
  const auto r = robustness_report(single_qubit_spec({4.0, 1.0, 0.0}, FieldDisorder{1, 1, 0}));
  const std::vector<double> zero{0, 0, 0};
  EXPECT_EQ(predicted_marker(r, zero), 0.0);
  const std::vector<double> s{0.3, 0.5, 0.7};
  const std::vector<double> s2{0.6, 1.0, 1.4};
  EXPECT_DOUBLE_EQ(predicted_marker(r, s2), 4.0 * predicted_marker(r, s));
  const double sm = *r.sigma_max;
  const std::vector<double> at_max{sm, sm, sm};
  EXPECT_NEAR(predicted_marker(r, at_max), -1.0, 1e-14);
  // ln|g| = 2 ln sigma + ln|C|.
  const std::vector<double> eq{0.2, 0.2, 0.2};
  EXPECT_NEAR(std::log(std::abs(predicted_marker(r, eq))),
              2.0 * std::log(0.2) + std::log(std::abs(r.c2_total)), 1e-14);
}

TEST(PredictedMarker, ThirdOrderNeedsThirdOrderData) {
  const auto spec = single_qubit_spec({2.0, 1.0, 0.3}, FieldDisorder{1, 1, 0});
  const std::vector<double> s{0.1, 0.1, 0.1}, gamma{0.5, 0.5, 0.5};
  const auto r2 = robustness_report(spec, 2);
  try {
    (void)predicted_marker(r2, s, std::span<const double>(gamma));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingThirdOrder);
  }
  const auto r3 = robustness_report(spec, 3);
  double want = 0;
  for (int n = 0; n < 3; ++n) {
    want += 0.01 * r3.c2_per_term[n] + 0.5 * 1e-3 * (*r3.c3_per_term)[n];
  }
  EXPECT_NEAR(predicted_marker(r3, s, std::span<const double>(gamma)), want, 1e-15);
  EXPECT_THROW((void)predicted_marker(r3, std::vector<double>{0.1}), Error);
}

TEST(OptimizeResilience, PicksTransverseOptimum) {
  const SingleQubitParams p{4.0, 1.0, 0.0};
  const auto spec = single_qubit_spec(p, FieldDisorder{0.1, 0.2, 0.0});
  std::vector<std::vector<double>> grid;
  const int points = 2000;
  for (int k = 0; k < points; ++k) grid.push_back({-M_PI / 2 + M_PI * k / points});
  const auto best = optimize_resilience(
      spec, [](std::span<const double> b) { return equator_state(b[0]); }, grid);
  const double beta_y = beta_optima(p).second;
  // pi-periodic in beta: compare modulo pi.
  const double diff = std::remainder(best.parameters[0] - beta_y, M_PI);
  EXPECT_LT(std::abs(diff), 2.0 * M_PI / points);
}

TEST(OptimizeResilience, EqualSigmasMakeMarkerBetaIndependent) {
  const auto spec = single_qubit_spec({4.0, 1.0, 0.0}, FieldDisorder{0.2, 0.2, 0.0});
  std::vector<double> values;
  for (int k = 0; k < 50; ++k) {
    const std::vector<std::vector<double>> one{{0.1 * k}};
    values.push_back(optimize_resilience(
        spec, [](std::span<const double> b) { return equator_state(b[0]); }, one).abs_marker);
  }
  for (double v : values) EXPECT_NEAR(v, values.front(), 1e-9);
}

TEST(OptimizeResilience, OnePointAndEmptyGrids) {
  const auto spec = single_qubit_spec({4.0, 1.0, 0.0}, FieldDisorder{0.2, 0.1, 0.0});
  auto family = [](std::span<const double> b) { return equator_state(b[0]); };
  const auto best = optimize_resilience(spec, family, {{0.37}});
  EXPECT_EQ(best.parameters, std::vector<double>{0.37});
  try {
    (void)optimize_resilience(spec, family, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyGrid);
  }
}

}  // namespace
}  // namespace qfirob
