#include "qfirob/kernels.hpp"

#include <array>
#include <cmath>

#include "qfirob/divided_difference.hpp"
#include "qfirob/error.hpp"

namespace qfirob {

KernelEvaluator::KernelEvaluator(RVector energies, double t, double guard)
    : e_(std::move(energies)),
      t_(t),
      eps_(degeneracy_threshold(e_)),
      guard_(guard) {}

bool KernelEvaluator::ill_conditioned(std::initializer_list<Index> idx) const {
  for (auto a = idx.begin(); a != idx.end(); ++a) {
    for (auto b = a + 1; b != idx.end(); ++b) {
      const double gap = std::abs(w(*a, *b));
      if (gap >= eps_ && gap * t_ < guard_) return true;
    }
  }
  return false;
}

Complex KernelEvaluator::T(Index i, Index j) const {
  if (coincide(i, j)) return {t_, 0.0};
  const double wij = w(i, j);
  // -i (e^{iwt} - 1) / w without the cancellation in e^{iwt} - 1.
  return 2.0 * std::sin(0.5 * wij * t_) * expi(0.5 * wij) / wij;
}

Complex KernelEvaluator::S(Index i, Index j, Index k) const {
  if (ill_conditioned({i, j, k})) {
    const std::array<double, 2> f{w(k, j), w(i, k)};
    return kI * nested_phase_integral(f, t_);
  }
  return S_closed(i, j, k);
}

Complex KernelEvaluator::S_closed(Index i, Index j, Index k) const {
  if (!coincide(i, k)) return (T(i, j) - T(k, j)) / w(i, k);
  if (coincide(i, j)) return kI * (t_ * t_ / 2.0);
  const double wij = w(i, j);
  const Complex e = expi(wij);
  return (t_ * wij * e + kI * (e - 1.0)) / (wij * wij);
}

Complex KernelEvaluator::R(Index i, Index j, Index k, Index l) const {
  if (ill_conditioned({i, j, k, l})) {
    const std::array<double, 3> f{w(l, j), w(k, l), w(i, k)};
    return -nested_phase_integral(f, t_);
  }
  if (!coincide(i, k)) return (S_closed(i, j, l) - S_closed(k, j, l)) / w(i, k);
  const double t = t_;
  if (!coincide(i, j)) {
    if (!coincide(i, l)) {
      if (!coincide(j, l)) {
        const double wij = w(i, j), wil = w(i, l), wjl = w(j, l);
        return (kI * expi(w(l, j)) * wij * wij - kI * wil * wil +
                expi(wij) * wjl * (kI * (wij + wil) + wij * wil * t)) /
               (wij * wij * wil * wil * wjl);
      }
      const double wli = w(l, i);
      return (2.0 * kI + wli * t + expi(w(i, l)) * (wli * t - 2.0 * kI)) /
             (wli * wli * wli);
    }
    const double wij = w(i, j);
    return 0.5 * kI *
           (2.0 + expi(wij) * (-2.0 + 2.0 * kI * t * wij + wij * wij * t * t)) /
           (wij * wij * wij);
  }
  if (!coincide(i, l)) {
    const double wil = w(i, l);
    return 0.5 * kI * t * t / wil -
           (kI * (1.0 - expi(-wil)) + wil * t) / (wil * wil * wil);
  }
  return {-t * t * t / 6.0, 0.0};
}

Complex KernelEvaluator::Rbar(Index i, Index j, Index k, Index l) const {
  if (ill_conditioned({i, j, k, l})) {
    const std::array<double, 3> f1{w(k, l), w(i, k), w(l, j)};
    const std::array<double, 3> f2{w(k, l), w(l, j), w(i, k)};
    return std::conj(nested_phase_integral(f1, t_) +
                     nested_phase_integral(f2, t_));
  }
  if (!coincide(i, k)) {
    return (S_closed(l, i, j) - S_closed(l, k, j)) / w(i, k);
  }
  const double t = t_;
  if (!coincide(i, j)) {
    if (!coincide(i, l)) {
      if (!coincide(j, l)) {
        const double wij = w(i, j), wil = w(i, l), wjl = w(j, l);
        return (kI * (wij + wil) * wjl +
                expi(w(j, i)) * wil * wil * (-kI + wij * t) +
                expi(w(l, i)) * wij * wij * (kI - wil * t)) /
               (wij * wij * wil * wil * wjl);
      }
      const double wli = w(l, i);
      return kI *
             (2.0 + expi(wli) * (-2.0 + 2.0 * kI * t * wli + wli * wli * t * t)) /
             (w(i, l) * w(i, l) * w(i, l));
    }
    const double wij = w(i, j);
    return 0.5 *
           (2.0 * expi(-wij) * (kI - wij * t) - kI * (2.0 + wij * wij * t * t)) /
           (wij * wij * wij);
  }
  if (!coincide(i, l)) {
    const double wil = w(i, l);
    return 0.5 *
           (2.0 * expi(-wil) * (kI - wil * t) - kI * (2.0 + wil * wil * t * t)) /
           (wil * wil * wil);
  }
  return {t * t * t / 3.0, 0.0};
}

KernelTensors build_kernels(const SpectralDecomposition& spectrum, double t) {
  const Index d = spectrum.dim();
  if (d > kMaxMaterializedDim) {
    throw Error(ErrorKind::TooLarge,
                "kernel tensors are materialized only up to dim 64");
  }
  const KernelEvaluator ev(spectrum.eigenvalues, t);
  KernelTensors k;
  k.dim = d;
  k.time = t;
  k.T.resize(d, d);
  const auto d2 = static_cast<std::size_t>(d * d);
  k.S.resize(d2 * static_cast<std::size_t>(d));
  k.R.resize(d2 * d2);
  k.Rbar.resize(d2 * d2);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      k.T(i, j) = ev.T(i, j);
      for (Index a = 0; a < d; ++a) {
        k.S[static_cast<std::size_t>((i * d + j) * d + a)] = ev.S(i, j, a);
        for (Index b = 0; b < d; ++b) {
          const auto idx = static_cast<std::size_t>(((i * d + j) * d + a) * d + b);
          k.R[idx] = ev.R(i, j, a, b);
          k.Rbar[idx] = ev.Rbar(i, j, a, b);
        }
      }
    }
  }
  return k;
}

}  // namespace qfirob
