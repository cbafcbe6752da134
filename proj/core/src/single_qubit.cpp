#include "qfirob/single_qubit.hpp"

#include <cmath>
#include <numbers>

#include "qfirob/error.hpp"

namespace qfirob {

HermitianMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianMatrix(m);
}

HermitianMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return HermitianMatrix(m);
}

HermitianMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianMatrix(m);
}

PureState equator_state(double beta) {
  CVector v(2);
  v << 1.0, std::exp(kI * beta);
  return PureState(v / std::sqrt(2.0));
}

DisorderedProbeSpec single_qubit_spec(const SingleQubitParams& p,
                                      const FieldDisorder& disorder) {
  auto law = [&](double sigma) {
    switch (disorder.kind) {
      case DistributionKind::uniform:
        return DisorderDistribution::uniform(0.0, sigma);
      case DistributionKind::skew_normal:
        return DisorderDistribution::skew_normal(0.0, sigma, disorder.skewness);
      case DistributionKind::gaussian:
        break;
    }
    return DisorderDistribution::gaussian(0.0, sigma);
  };
  std::vector<DisorderTerm> terms{
      {pauli_x(), law(disorder.sigma_x), "h_x"},
      {pauli_y(), law(disorder.sigma_y), "h_y"},
      {pauli_z(), law(disorder.sigma_z), "h_z"},
  };
  return DisorderedProbeSpec(p.h0z * pauli_z(), pauli_z(),
                             HermitianMatrix::zero(2), std::move(terms), p.t,
                             equator_state(p.beta));
}

double c2_closed_form(const SingleQubitParams& p, Axis axis) {
  if (axis == Axis::z) return 0.0;
  if (std::abs(p.h0z) < 1e-12) {
    throw Error(ErrorKind::SingularField, "|h0z| < 1e-12");
  }
  if (!(p.t > 0.0)) throw Error(ErrorKind::InvalidSpec, "t must be positive");
  const double h = p.h0z, t = p.t, b = p.beta;
  const double x = h * t;
  const double dx = axis == Axis::x ? 1.0 : 0.0;
  const double dy = axis == Axis::y ? 1.0 : 0.0;
  const double lin = x * (dx * std::cos(b) + dy * std::sin(b)) -
                     (dx * std::cos(x + b) + dy * std::sin(x + b)) * std::sin(x);
  const double h2 = h * h;
  return -(lin * lin + 0.5 * (std::cos(2.0 * x) + 2.0 * x * x - 1.0)) /
         (h2 * h2 * t * t);
}

std::pair<double, double> beta_optima(const SingleQubitParams& p) {
  const double x = p.h0z * p.t;
  const double s = std::sin(x);
  if (std::abs(s) < 1e-9) {
    throw Error(ErrorKind::SingularPoint, "|sin(h0z t)| < 1e-9");
  }
  const double beta_x = std::atan((0.5 * std::sin(2.0 * x) - x) / (s * s));
  return {beta_x, beta_x - std::numbers::pi / 2.0};
}

double select_beta(double sigma_x, double sigma_y, const SingleQubitParams& p) {
  if (sigma_x == sigma_y) {
    throw Error(ErrorKind::DegenerateSigmas,
                "sigma_x == sigma_y leaves beta free");
  }
  const auto [beta_x, beta_y] = beta_optima(p);
  return sigma_x < sigma_y ? beta_y : beta_x;
}

CrossoverTimes crossover_time(double h) {
  if (std::abs(h) < 1e-12) {
    throw Error(ErrorKind::SingularField, "|h0z| < 1e-12");
  }
  CrossoverTimes out;
  out.tau_approx = 1.0 - 5.0 * h * h / 12.0;
  const double c = std::cos(h);
  const double root = std::sqrt(c * c + 3.0);
  // sin(h)/h through its series near 0 to avoid 0/0 rounding.
  const double sinc = std::abs(h) < 1e-4 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
  out.t_plus = sinc / 3.0 * (c + root);
  out.t_minus = sinc / 3.0 * (c - root);
  return out;
}

}  // namespace qfirob
