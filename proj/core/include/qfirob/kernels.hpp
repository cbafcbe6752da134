#pragma once

// Phase kernels T, S, R, Rbar of the eigenbasis Dyson expansion, with the
// exact limits at coincident energy gaps. Indices refer to eigenvalues of the
// clean Hamiltonian; w_ij = E_i - E_j.

#include <vector>

#include "qfirob/linalg.hpp"

namespace qfirob {

inline constexpr Index kMaxMaterializedDim = 64;

// Gaps with eps <= |w| t < guard make the closed forms cancel badly (they
// divide by up to five gap factors); such entries are evaluated as divided
// differences instead. guard = 0 keeps the closed forms everywhere.
inline constexpr double kDefaultKernelGuard = 0.1;

class KernelEvaluator {
 public:
  KernelEvaluator(RVector energies, double t,
                  double guard = kDefaultKernelGuard);

  Index dim() const noexcept { return e_.size(); }
  double time() const noexcept { return t_; }
  double eps() const noexcept { return eps_; }
  bool coincide(Index i, Index j) const {
    return std::abs(e_(i) - e_(j)) < eps_;
  }
  double w(Index i, Index j) const { return e_(i) - e_(j); }
  // Coincident, or close enough that dividing by the gap loses accuracy.
  bool near(Index i, Index j) const {
    return coincide(i, j) || std::abs(w(i, j)) * t_ < guard_;
  }

  Complex T(Index i, Index j) const;
  Complex S(Index i, Index j, Index k) const;
  Complex R(Index i, Index j, Index k, Index l) const;
  Complex Rbar(Index i, Index j, Index k, Index l) const;

 private:
  Complex expi(double w) const { return std::exp(kI * w * t_); }
  bool ill_conditioned(std::initializer_list<Index> idx) const;
  Complex S_closed(Index i, Index j, Index k) const;

  RVector e_;
  double t_;
  double eps_;
  double guard_;
};

struct KernelTensors {
  Index dim = 0;
  double time = 0.0;
  CMatrix T;
  std::vector<Complex> S;     // S[(i d + j) d + k]
  std::vector<Complex> R;     // R[((i d + j) d + k) d + l]
  std::vector<Complex> Rbar;  // same layout as R

  Complex s(Index i, Index j, Index k) const {
    return S[static_cast<std::size_t>((i * dim + j) * dim + k)];
  }
  Complex r(Index i, Index j, Index k, Index l) const {
    return R[static_cast<std::size_t>(((i * dim + j) * dim + k) * dim + l)];
  }
  Complex rbar(Index i, Index j, Index k, Index l) const {
    return Rbar[static_cast<std::size_t>(((i * dim + j) * dim + k) * dim + l)];
  }
};

// Materializes every kernel entry; TooLarge above kMaxMaterializedDim.
KernelTensors build_kernels(const SpectralDecomposition& spectrum, double t);

}  // namespace qfirob
