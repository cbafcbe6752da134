#include "qfirob/linalg.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <string>

#include "qfirob/error.hpp"

namespace qfirob {

namespace {

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " +
                    std::to_string(b));
  }
}

}  // namespace

double hermiticity_defect(const CMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  const double scale = a.cwiseAbs().maxCoeff();
  if (a.size() == 0 || scale == 0.0) return 0.0;
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  return asym / scale;
}

HermitianMatrix::HermitianMatrix(const CMatrix& entries, double rel_tol) {
  if (entries.rows() != entries.cols()) {
    throw Error(ErrorKind::NonHermitianInput, "matrix is not square");
  }
  if (!(hermiticity_defect(entries) <= rel_tol)) {
    throw Error(ErrorKind::NonHermitianInput,
                "relative asymmetry " + format_double(hermiticity_defect(entries)) +
                    " exceeds tolerance " + format_double(rel_tol));
  }
  m_ = 0.5 * (entries + entries.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Index dim) {
  return HermitianMatrix(CMatrix::Zero(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(Index dim) {
  return HermitianMatrix(CMatrix::Identity(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& values) {
  return HermitianMatrix(values.cast<Complex>().asDiagonal().toDenseMatrix(),
                         Trusted{});
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
  require_same_dim(dim(), other.dim(), "HermitianMatrix +");
  m_ += other.m_;
  return *this;
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "HermitianMatrix -");
  return HermitianMatrix(a.m_ - b.m_, HermitianMatrix::Trusted{});
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  return HermitianMatrix(s * a.m_, HermitianMatrix::Trusted{});
}

double degeneracy_threshold(const RVector& ascending_eigenvalues) {
  if (ascending_eigenvalues.size() == 0) return 1e-9;
  const double span = ascending_eigenvalues(ascending_eigenvalues.size() - 1) -
                      ascending_eigenvalues(0);
  return 1e-9 * (span + 1.0);
}

double SpectralDecomposition::degeneracy_threshold() const {
  return qfirob::degeneracy_threshold(eigenvalues);
}

CMatrix SpectralDecomposition::to_eigenbasis(const CMatrix& a) const {
  require_same_dim(dim(), a.rows(), "to_eigenbasis");
  return basis.adjoint() * a * basis;
}

CMatrix SpectralDecomposition::from_eigenbasis(const CMatrix& a) const {
  require_same_dim(dim(), a.rows(), "from_eigenbasis");
  return basis * a * basis.adjoint();
}

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  const double norm2 = amplitudes_.squaredNorm();
  if (amplitudes_.size() == 0 || std::abs(norm2 - 1.0) > kNormTol) {
    throw Error(ErrorKind::NotNormalized,
                "squared norm " + std::to_string(norm2));
  }
}

PureState PureState::normalized(const CVector& amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw Error(ErrorKind::NotNormalized, "zero vector");
  return PureState(amplitudes / n);
}

PureState PureState::basis_state(Index dim, Index k) {
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return PureState(std::move(v));
}

SpectralDecomposition eigh(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonHermitianInput, "eigensolver did not converge");
  }
  return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

Complex braket(const PureState& psi, const CMatrix& a) {
  require_same_dim(psi.dim(), a.rows(), "braket");
  return psi.amplitudes().dot(a * psi.amplitudes());
}

double expectation(const HermitianMatrix& a, const PureState& psi) {
  const Complex value = braket(psi, a.matrix());
  const double scale = std::max(1.0, a.matrix().cwiseAbs().maxCoeff());
  if (std::abs(value.imag()) > 1e-10 * scale) {
    throw Error(ErrorKind::NonHermitianInput,
                "expectation has imaginary part " +
                    std::to_string(value.imag()));
  }
  return value.real();
}

double variance(const HermitianMatrix& a, const PureState& psi) {
  require_same_dim(psi.dim(), a.dim(), "variance");
  // Var = || (A - <A>) psi ||^2 avoids the <A^2> - <A>^2 cancellation.
  const CVector a_psi = a.matrix() * psi.amplitudes();
  const Complex mean = psi.amplitudes().dot(a_psi);
  const double v = (a_psi - mean.real() * psi.amplitudes()).squaredNorm();
  return std::max(v, 0.0);
}

PureState evolve(const PureState& psi, const SpectralDecomposition& spectrum,
                 double t) {
  require_same_dim(psi.dim(), spectrum.dim(), "evolve");
  CVector coeffs = spectrum.basis.adjoint() * psi.amplitudes();
  for (Index k = 0; k < coeffs.size(); ++k) {
    coeffs(k) *= std::exp(-kI * spectrum.eigenvalues(k) * t);
  }
  CVector out = spectrum.basis * coeffs;
  // Unitary up to rounding; renormalize so the invariant is exact.
  return PureState(out / out.norm());
}

PureState evolve(const PureState& psi, const HermitianMatrix& h, double t) {
  require_same_dim(psi.dim(), h.dim(), "evolve");
  return evolve(psi, eigh(h), t);
}

double commutator_norm(const CMatrix& a, const CMatrix& b) {
  return (a * b - b * a).norm();
}

}  // namespace qfirob
