#include "qfirob/qfi.hpp"

#include <cmath>
#include <vector>

#include "qfirob/error.hpp"

namespace qfirob {

Complex phase_integral(double gap, double t, double eps) {
  if (std::abs(gap) < eps) return {t, 0.0};
  return -kI * (std::exp(kI * gap * t) - 1.0) / gap;
}

QfigResult qfig_exact(const SpectralDecomposition& spectrum,
                      const HermitianMatrix& dtheta_h, double t) {
  if (dtheta_h.dim() != spectrum.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "qfig_exact operand dims");
  }
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidSpec, "time must be positive");
  const Index d = spectrum.dim();
  const double eps = spectrum.degeneracy_threshold();
  CMatrix g = spectrum.to_eigenbasis(dtheta_h.matrix());
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      g(i, j) *= phase_integral(
          spectrum.eigenvalues(i) - spectrum.eigenvalues(j), t, eps);
    }
  }
  return {HermitianMatrix(spectrum.from_eigenbasis(g), 1e-10), t};
}

QfigResult qfig_exact(const HermitianMatrix& h, const HermitianMatrix& dtheta_h,
                      double t) {
  if (dtheta_h.dim() != h.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "qfig_exact operand dims");
  }
  return qfig_exact(eigh(h), dtheta_h, t);
}

double qfi(const PureState& psi, const QfigResult& g) {
  return 4.0 * variance(g.generator, psi);
}

namespace {

CVector phase_fixed(CVector v) {
  Index arg = 0;
  double best = -1.0;
  for (Index k = 0; k < v.size(); ++k) {
    // Ties resolve to the lowest index.
    if (std::abs(v(k)) > best + 1e-12) {
      best = std::abs(v(k));
      arg = k;
    }
  }
  return v * (std::abs(v(arg)) / v(arg));
}

// Deterministic unit vector in span(basis columns [lo, hi)), orthogonal to
// `avoid` (may be empty): the projection of the first computational basis
// vector with a non-negligible component.
CVector canonical_vector(const CMatrix& basis, Index lo, Index hi,
                         const CVector& avoid) {
  const CMatrix sub = basis.middleCols(lo, hi - lo);
  for (Index k = 0; k < basis.rows(); ++k) {
    CVector e = CVector::Zero(basis.rows());
    e(k) = 1.0;
    CVector p = sub * (sub.adjoint() * e);
    if (avoid.size() > 0) p -= avoid * avoid.dot(p);
    if (p.norm() > 1e-6) return phase_fixed(p / p.norm());
  }
  return phase_fixed(sub.col(0));
}

}  // namespace

PureState optimal_state(const QfigResult& g, double beta) {
  const SpectralDecomposition s = eigh(g.generator);
  const Index d = s.dim();
  if (d < 2) throw Error(ErrorKind::InvalidSpec, "state space dim < 2");
  const double eps = s.degeneracy_threshold();
  const RVector& e = s.eigenvalues;
  Index lo_end = 1;
  while (lo_end < d && e(lo_end) - e(0) < eps) ++lo_end;
  Index hi_begin = d - 1;
  while (hi_begin > 0 && e(d - 1) - e(hi_begin - 1) < eps) --hi_begin;

  const CVector v_min = canonical_vector(s.basis, 0, lo_end, CVector());
  // A fully degenerate G has lo and hi subspaces equal; keep them orthogonal.
  const CVector v_max = canonical_vector(
      s.basis, hi_begin, d, lo_end > hi_begin ? v_min : CVector());
  return PureState::normalized(v_min + std::exp(kI * beta) * v_max);
}

}  // namespace qfirob
