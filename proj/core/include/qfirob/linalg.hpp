#pragma once

// Dense complex-Hermitian linear algebra shared by every module: Hermitian
// operators, their spectral decompositions and normalized pure states.

#include <complex>

#include <Eigen/Dense>

namespace qfirob {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

// Relative tolerance of the Hermiticity check, scaled by max |entry|.
inline constexpr double kHermitianRelTol = 1e-12;
inline constexpr double kNormTol = 1e-12;

// Dense Hermitian matrix. Hermiticity is checked once on construction and the
// stored entries are replaced by the exact Hermitian part, so sums and real
// multiples stay exactly Hermitian.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& entries,
                           double rel_tol = kHermitianRelTol);

  static HermitianMatrix zero(Index dim);
  static HermitianMatrix identity(Index dim);
  static HermitianMatrix diagonal(const RVector& values);

  Index dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

  HermitianMatrix& operator+=(const HermitianMatrix& other);
  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) {
    a += b;
    return a;
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a,
                                   const HermitianMatrix& b);
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a);

 private:
  struct Trusted {};
  HermitianMatrix(CMatrix entries, Trusted) : m_(std::move(entries)) {}

  CMatrix m_;
};

// Largest asymmetry |A_ij - conj(A_ji)| relative to max |A_ij| (0 for a zero
// matrix).
double hermiticity_defect(const CMatrix& a);

struct SpectralDecomposition {
  RVector eigenvalues;  // ascending
  CMatrix basis;        // columns are eigenvectors

  Index dim() const noexcept { return eigenvalues.size(); }
  // Gaps below this are treated as exact coincidences by the kernels.
  double degeneracy_threshold() const;

  CMatrix to_eigenbasis(const CMatrix& a) const;    // S^dagger A S
  CMatrix from_eigenbasis(const CMatrix& a) const;  // S A S^dagger
};

// Gap threshold 1e-9 * (E_max - E_min + 1).
double degeneracy_threshold(const RVector& ascending_eigenvalues);

class PureState {
 public:
  PureState() = default;
  // Throws NotNormalized unless sum |a_k|^2 == 1 within kNormTol.
  explicit PureState(CVector amplitudes);

  static PureState normalized(const CVector& amplitudes);
  static PureState basis_state(Index dim, Index k);

  Index dim() const noexcept { return amplitudes_.size(); }
  const CVector& amplitudes() const noexcept { return amplitudes_; }

 private:
  CVector amplitudes_;
};

SpectralDecomposition eigh(const HermitianMatrix& h);

// <psi|A|psi> for an arbitrary (not necessarily Hermitian) matrix.
Complex braket(const PureState& psi, const CMatrix& a);

double expectation(const HermitianMatrix& a, const PureState& psi);
double variance(const HermitianMatrix& a, const PureState& psi);

// exp(-i H t) |psi>, via the spectral decomposition of H.
PureState evolve(const PureState& psi, const HermitianMatrix& h, double t);
PureState evolve(const PureState& psi, const SpectralDecomposition& spectrum,
                 double t);

// Frobenius norm of [A, B].
double commutator_norm(const CMatrix& a, const CMatrix& b);

}  // namespace qfirob
