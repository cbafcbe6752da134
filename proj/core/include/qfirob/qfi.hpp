#pragma once

// Exact QFI generator G = int_0^t e^{iHs} dH e^{-iHs} ds and the QFI 4 Var(G).

#include "qfirob/linalg.hpp"

namespace qfirob {

// int_0^t e^{i gap s} ds; returns t when |gap| < eps.
Complex phase_integral(double gap, double t, double eps);

struct QfigResult {
  HermitianMatrix generator;
  double time = 0.0;
};

QfigResult qfig_exact(const HermitianMatrix& h, const HermitianMatrix& dtheta_h,
                      double t);
QfigResult qfig_exact(const SpectralDecomposition& spectrum,
                      const HermitianMatrix& dtheta_h, double t);

double qfi(const PureState& psi, const QfigResult& g);

// (|lambda_min> + e^{i beta} |lambda_max>) / sqrt(2) for the extremal
// eigenvectors of G.
PureState optimal_state(const QfigResult& g, double beta);

}  // namespace qfirob
