#include "oracles.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qfirob::oracle {

CMatrix random_hermitian(Index d, Rng& rng, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  }
  return scale * 0.5 * (a + a.adjoint());
}

CVector random_state(Index d, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector v(d);
  for (Index i = 0; i < d; ++i) v(i) = Complex(n(rng), n(rng));
  return v / v.norm();
}

RVector separated_spectrum(Index d, Rng& rng, double min_gap, double spread) {
  std::uniform_real_distribution<double> u(0.0, spread);
  RVector e(d);
  double x = -0.5 * (min_gap + spread) * static_cast<double>(d) / 2.0;
  for (Index i = 0; i < d; ++i) {
    x += min_gap + u(rng);
    e(i) = x;
  }
  return e;
}

CMatrix taylor_expm(const CMatrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const CMatrix x = a / std::pow(2.0, squarings);
  CMatrix term = CMatrix::Identity(a.rows(), a.cols());
  CMatrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

CMatrix simpson_generator(const CMatrix& h, const CMatrix& v, double t,
                          int panels) {
  if (panels % 2) ++panels;
  const double step = t / panels;
  const CMatrix u_step = taylor_expm(-kI * h * step);
  CMatrix u = CMatrix::Identity(h.rows(), h.cols());
  CMatrix sum = CMatrix::Zero(h.rows(), h.cols());
  for (int k = 0; k <= panels; ++k) {
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * (u.adjoint() * v * u);
    u = u_step * u;
  }
  return sum * step / 3.0;
}

double fd_qfi(const std::function<CMatrix(double)>& h_of_theta, double theta,
              const CVector& psi, double t, double step) {
  auto evolve = [&](double th) -> CVector {
    return taylor_expm(-kI * h_of_theta(th) * t) * psi;
  };
  const CVector p0 = evolve(theta);
  const CVector dp = (evolve(theta + step) - evolve(theta - step)) / (2.0 * step);
  return 4.0 * (dp.squaredNorm() - std::norm(p0.dot(dp)));
}

std::vector<CMatrix> generator_coefficients(const CMatrix& h0, const CMatrix& d,
                                            const CMatrix& n, double t,
                                            int order) {
  const Index dim = h0.rows();
  const Index ka = order + 1;
  // Shift matrices: J(k, k + 1) = 1.
  CMatrix ja = CMatrix::Zero(ka, ka);
  for (Index k = 0; k + 1 < ka; ++k) ja(k, k + 1) = 1.0;
  CMatrix je = CMatrix::Zero(2, 2);
  je(0, 1) = 1.0;
  const CMatrix ia = CMatrix::Identity(ka, ka);
  const CMatrix ie = CMatrix::Identity(2, 2);

  const CMatrix a = -kI * h0 * t;
  const CMatrix b = -kI * n * t;
  const CMatrix c = -kI * d * t;
  CMatrix big = Eigen::kroneckerProduct(Eigen::kroneckerProduct(ia, ie).eval(), a).eval();
  big += Eigen::kroneckerProduct(Eigen::kroneckerProduct(ja, ie).eval(), b).eval();
  big += Eigen::kroneckerProduct(Eigen::kroneckerProduct(ia, je).eval(), c).eval();
  const CMatrix e = big.exp();

  // Block row 0 holds the coefficients of a^k eps^s at block column (k, s).
  auto block = [&](Index k, Index s) {
    return e.block(0, (k * 2 + s) * dim, dim, dim);
  };
  std::vector<CMatrix> g;
  for (int m = 0; m <= order; ++m) {
    CMatrix acc = CMatrix::Zero(dim, dim);
    for (int p = 0; p <= m; ++p) acc += block(p, 0).adjoint() * block(m - p, 1);
    g.push_back(kI * acc);
  }
  return g;
}

std::vector<double> variance_coefficients(const std::vector<CMatrix>& g,
                                          const CVector& psi) {
  const std::size_t k = g.size();
  std::vector<Complex> mean(k);
  for (std::size_t p = 0; p < k; ++p) mean[p] = psi.dot(g[p] * psi);
  std::vector<double> v(k, 0.0);
  for (std::size_t m = 0; m < k; ++m) {
    Complex acc = 0.0;
    for (std::size_t p = 0; p <= m; ++p) {
      acc += (g[p] * psi).dot(g[m - p] * psi);
      acc -= mean[p] * mean[m - p];
    }
    v[m] = acc.real();
  }
  return v;
}

Complex bidiagonal_divided_difference(const std::vector<Complex>& z, double t) {
  // Extended precision: scaling and squaring loses digits in the small corner.
  using LComplex = std::complex<long double>;
  using LMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;
  const Index m = static_cast<Index>(z.size());
  LMatrix a = LMatrix::Zero(m, m);
  for (Index k = 0; k < m; ++k) {
    const Complex zk = z[static_cast<std::size_t>(k)];
    a(k, k) = LComplex(zk.real(), zk.imag()) * static_cast<long double>(t);
    if (k > 0) a(k, k - 1) = static_cast<long double>(t);
  }
  const LMatrix e = a.exp();
  return {static_cast<double>(e(m - 1, 0).real()), static_cast<double>(e(m - 1, 0).imag())};
}

namespace {

CMatrix site_operator(int n_sites, int site, const CMatrix& local,
                      bool with_string) {
  const CMatrix id = CMatrix::Identity(2, 2);
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  // Site 0 is the least significant bit, so it is the rightmost factor.
  CMatrix out = CMatrix::Identity(1, 1);
  for (int s = n_sites - 1; s >= 0; --s) {
    const CMatrix& f = s == site ? local : (with_string && s < site ? z : id);
    out = Eigen::kroneckerProduct(out, f).eval();
  }
  return out;
}

}  // namespace

CMatrix pauli_annihilator(int n_sites, int site) {
  CMatrix lower = CMatrix::Zero(2, 2);
  lower(0, 1) = 1.0;  // |0><1|: removes the particle
  return site_operator(n_sites, site, lower, true);
}

CMatrix pauli_dmu(int n_sites) {
  const Index dim = Index{1} << n_sites;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int i = 0; i < n_sites; ++i) {
    const CMatrix c = pauli_annihilator(n_sites, i);
    out -= c.adjoint() * c - 0.5 * CMatrix::Identity(dim, dim);
  }
  return out;
}

CMatrix pauli_kitaev(int n_sites, double mu, const std::vector<double>& tau,
                     const std::vector<double>& eta) {
  CMatrix h = mu * pauli_dmu(n_sites);
  for (int i = 0; i + 1 < n_sites; ++i) {
    const CMatrix ci = pauli_annihilator(n_sites, i);
    const CMatrix cj = pauli_annihilator(n_sites, i + 1);
    const CMatrix hop = ci.adjoint() * cj;
    const CMatrix pair = ci * cj;
    h += -tau[static_cast<std::size_t>(i)] * (hop + hop.adjoint());
    h += eta[static_cast<std::size_t>(i)] * (pair + pair.adjoint());
  }
  return h;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(std::abs(y[k]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qfirob::oracle
