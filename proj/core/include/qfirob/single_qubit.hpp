#pragma once

// Closed-form robustness coefficients of a qubit in a disordered magnetic
// field h_{0,z} Z + dh_x X + dh_y Y + dh_z Z, estimating h_z from the
// equator state (|0> + e^{i beta} |1>) / sqrt(2).

#include <utility>

#include "qfirob/probe.hpp"

namespace qfirob {

enum class Axis { x, y, z };

struct SingleQubitParams {
  double h0z = 1.0;
  double t = 1.0;
  double beta = 0.0;
};

HermitianMatrix pauli_x();
HermitianMatrix pauli_y();
HermitianMatrix pauli_z();

PureState equator_state(double beta);

struct FieldDisorder {
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double sigma_z = 0.0;
  DistributionKind kind = DistributionKind::gaussian;
  double skewness = 0.0;  // skew_normal only, shared by the three axes
};

// Terms ordered x, y, z; H_theta = h0z Z, dH = Z, equator initial state.
DisorderedProbeSpec single_qubit_spec(const SingleQubitParams& p,
                                      const FieldDisorder& disorder = {});

// C_n^(2) with x = h0z t:
//   -h^-4 t^-2 [ (x (dx cos b + dy sin b)
//                 - (dx cos(x + b) + dy sin(x + b)) sin x)^2
//                + (cos 2x + 2x^2 - 1) / 2 ],
// exactly 0 for z. SingularField when |h0z| < 1e-12.
double c2_closed_form(const SingleQubitParams& p, Axis axis);

// (beta_x, beta_y): beta_x = atan((sin(2x)/2 - x) / sin^2 x) maximizes C_x;
// beta_y = beta_x - pi/2 maximizes C_y. SingularPoint when |sin x| < 1e-9.
std::pair<double, double> beta_optima(const SingleQubitParams& p);

// beta_y for sigma_x < sigma_y, beta_x for sigma_x > sigma_y.
double select_beta(double sigma_x, double sigma_y, const SingleQubitParams& p);

struct CrossoverTimes {
  double t_plus = 0.0;
  double t_minus = 0.0;
  double tau_approx = 0.0;  // 1 - 5 h^2 / 12
};

// t_pm = sin h / (3 h) (cos h +- sqrt(cos^2 h + 3)).
CrossoverTimes crossover_time(double h0z);

}  // namespace qfirob
