#include "qfirob/kitaev.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qfirob/error.hpp"
#include "qfirob/parallel.hpp"
#include "qfirob/qfi.hpp"

namespace qfirob {

namespace {

constexpr int kMinGhzSites = 5;

void require_ghz_size(int n_sites) {
  if (n_sites < kMinGhzSites) {
    throw Error(ErrorKind::InvalidSize,
                "GHZ sector decomposition needs N > 4, got N = " +
                    std::to_string(n_sites));
  }
}

HermitianMatrix assemble_m(const RMatrix& a, const RMatrix& b) {
  const Index n = a.rows();
  RMatrix m(2 * n, 2 * n);
  m << a, b, -b, -a;
  return HermitianMatrix(m.cast<Complex>());
}

// Swaps the particle and hole halves of Nambu indices: a -> a +- N.
CMatrix half_swap(Index n) {
  CMatrix p = CMatrix::Zero(2 * n, 2 * n);
  p.topRightCorner(n, n).setIdentity();
  p.bottomLeftCorner(n, n).setIdentity();
  return p;
}

}  // namespace

KitaevParams KitaevParams::uniform(int n_sites, double mu, double tau0,
                                   double eta0, double sigma, double t) {
  KitaevParams p;
  p.n_sites = n_sites;
  p.mu = mu;
  const Index bonds = std::max(0, n_sites - 1);
  p.tau0 = RVector::Constant(bonds, tau0);
  p.eta0 = RVector::Constant(bonds, eta0);
  p.sigma_tau = sigma;
  p.sigma_eta = sigma;
  p.t = t;
  return p;
}

void KitaevParams::validate() const {
  if (n_sites < 2) {
    throw Error(ErrorKind::InvalidSize, "chain needs at least 2 sites");
  }
  if (tau0.size() != n_sites - 1 || eta0.size() != n_sites - 1) {
    throw Error(ErrorKind::LengthMismatch,
                "tau0 and eta0 need N - 1 = " + std::to_string(n_sites - 1) +
                    " entries");
  }
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidSpec, "t must be positive");
  if (sigma_tau < 0.0 || sigma_eta < 0.0) {
    throw Error(ErrorKind::InvalidDistribution, "negative sigma");
  }
}

BdGModel build_bdg(const KitaevParams& p, const RVector& delta_tau,
                   const RVector& delta_eta) {
  p.validate();
  const int n = p.n_sites;
  if (delta_tau.size() != n - 1 || delta_eta.size() != n - 1) {
    throw Error(ErrorKind::LengthMismatch,
                "fluctuation vectors need N - 1 = " + std::to_string(n - 1) +
                    " entries");
  }
  BdGModel m;
  m.A = RMatrix::Zero(n, n);
  m.B = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m.A(i, i) = -p.mu;
  for (int i = 0; i + 1 < n; ++i) {
    const double tau = p.tau0(i) + delta_tau(i);
    const double eta = p.eta0(i) + delta_eta(i);
    m.A(i, i + 1) = -tau;
    m.A(i + 1, i) = -tau;
    m.B(i, i + 1) = -eta;
    m.B(i + 1, i) = eta;
  }
  m.M = assemble_m(m.A, m.B);
  m.M_mu = bdg_number_operator(n);
  return m;
}

BdGModel build_bdg(const KitaevParams& p) {
  return build_bdg(p, RVector::Zero(p.n_sites - 1), RVector::Zero(p.n_sites - 1));
}

HermitianMatrix bdg_number_operator(int n_sites) {
  RVector diag(2 * n_sites);
  diag.head(n_sites).setConstant(-1.0);
  diag.tail(n_sites).setConstant(1.0);
  return HermitianMatrix::diagonal(diag);
}

std::vector<HermitianMatrix> bdg_bond_operators(int n_sites) {
  std::vector<HermitianMatrix> ops;
  const int n = n_sites;
  for (int i = 0; i + 1 < n; ++i) {
    RMatrix a = RMatrix::Zero(n, n);
    a(i, i + 1) = -1.0;
    a(i + 1, i) = -1.0;
    ops.push_back(assemble_m(a, RMatrix::Zero(n, n)));
  }
  for (int i = 0; i + 1 < n; ++i) {
    RMatrix b = RMatrix::Zero(n, n);
    b(i, i + 1) = -1.0;
    b(i + 1, i) = 1.0;
    ops.push_back(assemble_m(RMatrix::Zero(n, n), b));
  }
  return ops;
}

NambuJ qfig_j(const BdGModel& model, double t) {
  return {qfig_exact(model.M, model.M_mu, t).generator.matrix(), t};
}

FermionSectorFunctional::FermionSectorFunctional(int n_sites, Sector sector) {
  const Index n = n_sites;
  c_ = CMatrix::Zero(2 * n, 2 * n);
  // Vacuum: <c_i c_i^+> = 1 in the hole block. Filled: <c_i^+ c_i> = 1.
  if (sector == Sector::vacuum) {
    c_.bottomRightCorner(n, n).setIdentity();
  } else {
    c_.topLeftCorner(n, n).setIdentity();
  }
  const CMatrix p = half_swap(n);
  cbar_ = p * c_ * p;
  cp_ = c_ * p;
  pc_ = p * c_;
}

Complex FermionSectorFunctional::mean(const CMatrix& x) const {
  return 0.5 * x.cwiseProduct(c_).sum();
}

// <X Y> = 1/4 [ tr(X C^T) tr(Y C^T) + sum X_ab Y_de C_ae C_{b'd'}
//              - sum X_ab Y_de C_{ad'} C_{b'e} ],  a' = a +- N.
Complex FermionSectorFunctional::product(const CMatrix& x,
                                         const CMatrix& y) const {
  const Complex tx = x.cwiseProduct(c_).sum();
  const Complex ty = y.cwiseProduct(c_).sum();
  const Complex normal = (x * cbar_ * y).cwiseProduct(c_).sum();
  const Complex anomalous = (x * pc_ * y.transpose()).cwiseProduct(cp_).sum();
  return 0.25 * (tx * ty + normal - anomalous);
}

GhzFunctional::GhzFunctional(int n_sites)
    : vacuum_((require_ghz_size(n_sites), n_sites),
              FermionSectorFunctional::Sector::vacuum),
      filled_(n_sites, FermionSectorFunctional::Sector::filled) {}

Complex GhzFunctional::mean(const CMatrix& x) const {
  return 0.5 * (vacuum_.mean(x) + filled_.mean(x));
}

Complex GhzFunctional::product(const CMatrix& x, const CMatrix& y) const {
  return 0.5 * (vacuum_.product(x, y) + filled_.product(x, y));
}

GhzMoments ghz_mean_var(const NambuJ& j, int n_sites) {
  require_ghz_size(n_sites);
  if (j.J.rows() != 2 * n_sites) {
    throw Error(ErrorKind::DimensionMismatch, "J must be 2N x 2N");
  }
  using S = FermionSectorFunctional::Sector;
  const FermionSectorFunctional v(n_sites, S::vacuum), f(n_sites, S::filled);
  const double mv = v.mean(j.J).real();
  const double mf = f.mean(j.J).real();
  const double var_v = std::max(0.0, v.product(j.J, j.J).real() - mv * mv);
  const double var_f = std::max(0.0, f.product(j.J, j.J).real() - mf * mf);
  GhzMoments out;
  out.mean = 0.5 * (mv + mf);
  out.variance = 0.5 * (var_v + var_f) + 0.25 * (mv - mf) * (mv - mf);
  return out;
}

RobustnessReport kitaev_robustness(const KitaevParams& p, int order) {
  p.validate();
  require_ghz_size(p.n_sites);
  const BdGModel m = build_bdg(p);
  const auto ops = bdg_bond_operators(p.n_sites);
  const ExpansionTerms terms =
      build_expansion(m.M, m.M_mu, ops, p.t, order);
  return make_report(terms, GhzFunctional(p.n_sites));
}

KitaevQfiModel::KitaevQfiModel(KitaevParams p) : p_(std::move(p)) {
  p_.validate();
  require_ghz_size(p_.n_sites);
}

std::vector<DisorderDistribution> KitaevQfiModel::distributions() const {
  std::vector<DisorderDistribution> out;
  for (int i = 0; i < p_.bonds(); ++i) {
    out.push_back(DisorderDistribution::gaussian(p_.tau0(i), p_.sigma_tau));
  }
  for (int i = 0; i < p_.bonds(); ++i) {
    out.push_back(DisorderDistribution::gaussian(p_.eta0(i), p_.sigma_eta));
  }
  return out;
}

double KitaevQfiModel::qfi(const RVector& deltas) const {
  const Index b = p_.bonds();
  if (deltas.size() != 2 * b) {
    throw Error(ErrorKind::LengthMismatch, "Kitaev realization length");
  }
  const BdGModel m = build_bdg(p_, deltas.head(b), deltas.tail(b));
  return 4.0 * ghz_mean_var(qfig_j(m, p_.t), p_.n_sites).variance;
}

namespace {

void require_jw_size(int n_sites) {
  if (n_sites > kMaxJordanWignerSites) {
    throw Error(ErrorKind::TooLarge,
                "Jordan-Wigner oracle limited to 12 sites, got " +
                    std::to_string(n_sites));
  }
  if (n_sites < 1) throw Error(ErrorKind::InvalidSize, "no sites");
}

// Fermion ladder operators on occupation bitstrings with the Jordan-Wigner
// sign (-1)^(occupied sites below `site`). Return false when annihilated.
bool annihilate(std::uint64_t& state, int site, double& sign) {
  const std::uint64_t bit = std::uint64_t{1} << site;
  if (!(state & bit)) return false;
  if (std::popcount(state & (bit - 1)) % 2) sign = -sign;
  state &= ~bit;
  return true;
}

bool create(std::uint64_t& state, int site, double& sign) {
  const std::uint64_t bit = std::uint64_t{1} << site;
  if (state & bit) return false;
  if (std::popcount(state & (bit - 1)) % 2) sign = -sign;
  state |= bit;
  return true;
}

struct Ladder {
  bool dagger;
  int site;
};

// Adds coef * (product of ladder operators, rightmost applied first).
void add_product(CMatrix& h, double coef, std::initializer_list<Ladder> ops) {
  const std::uint64_t dim = static_cast<std::uint64_t>(h.rows());
  for (std::uint64_t in = 0; in < dim; ++in) {
    std::uint64_t s = in;
    double sign = 1.0;
    bool alive = true;
    for (auto it = std::rbegin(ops); it != std::rend(ops) && alive; ++it) {
      alive = it->dagger ? create(s, it->site, sign)
                         : annihilate(s, it->site, sign);
    }
    if (alive) h(static_cast<Index>(s), static_cast<Index>(in)) += coef * sign;
  }
}

}  // namespace

HermitianMatrix jw_dense_hamiltonian(const KitaevParams& p,
                                     const RVector& delta_tau,
                                     const RVector& delta_eta) {
  require_jw_size(p.n_sites);
  p.validate();
  const int n = p.n_sites;
  if (delta_tau.size() != n - 1 || delta_eta.size() != n - 1) {
    throw Error(ErrorKind::LengthMismatch, "fluctuation vector length");
  }
  const Index dim = Index{1} << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < n; ++i) {
    const double tau = p.tau0(i) + delta_tau(i);
    const double eta = p.eta0(i) + delta_eta(i);
    add_product(h, -tau, {{true, i}, {false, i + 1}});
    add_product(h, -tau, {{true, i + 1}, {false, i}});
    add_product(h, eta, {{false, i}, {false, i + 1}});
    add_product(h, eta, {{true, i + 1}, {true, i}});
  }
  h += p.mu * jw_dense_dmu(n).matrix();
  return HermitianMatrix(h);
}

HermitianMatrix jw_dense_dmu(int n_sites) {
  require_jw_size(n_sites);
  const Index dim = Index{1} << n_sites;
  RVector diag(dim);
  for (Index s = 0; s < dim; ++s) {
    diag(s) = -(std::popcount(static_cast<std::uint64_t>(s)) - 0.5 * n_sites);
  }
  return HermitianMatrix::diagonal(diag);
}

PureState jw_ghz_state(int n_sites) {
  require_jw_size(n_sites);
  const Index dim = Index{1} << n_sites;
  CVector v = CVector::Zero(dim);
  v(0) = 1.0 / std::sqrt(2.0);
  v(dim - 1) = 1.0 / std::sqrt(2.0);
  return PureState(v);
}

std::vector<PlaneCell> kitaev_plane_scan(int n_sites, double mu, double t,
                                         const PlaneGrid& grid,
                                         std::size_t workers) {
  if (grid.tau_points < 1 || grid.eta_points < 1) {
    throw Error(ErrorKind::EmptyGrid, "plane grid needs at least one point");
  }
  auto axis = [](double lo, double hi, int n, int k) {
    return n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  };
  const auto cells = static_cast<std::size_t>(grid.tau_points) *
                     static_cast<std::size_t>(grid.eta_points);
  return parallel_map<PlaneCell>(
      cells,
      [&](std::size_t idx) {
        const int it = static_cast<int>(idx / static_cast<std::size_t>(grid.eta_points));
        const int ie = static_cast<int>(idx % static_cast<std::size_t>(grid.eta_points));
        PlaneCell cell;
        cell.tau0 = axis(grid.tau_lo, grid.tau_hi, grid.tau_points, it);
        cell.eta0 = axis(grid.eta_lo, grid.eta_hi, grid.eta_points, ie);
        const auto report = kitaev_robustness(
            KitaevParams::uniform(n_sites, mu, cell.tau0, cell.eta0, 0.0, t));
        cell.c2 = report.c2_total;
        cell.classification = report.classification;
        return cell;
      },
      workers);
}

}  // namespace qfirob
