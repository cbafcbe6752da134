#pragma once

// Disordered open Kitaev chain
//   H = sum_i -tau_i (c_i^+ c_{i+1} + h.c.) + eta_i (c_i c_{i+1} + c_{i+1}^+ c_i^+)
//       - mu sum_i (n_i - 1/2),
// estimating mu from the GHZ state. Everything is computed in the 2N-dim
// Nambu space, H = (1/2) c^+ M c, with a dense Jordan-Wigner oracle.

#include <vector>

#include "qfirob/expansion.hpp"
#include "qfirob/monte_carlo.hpp"

namespace qfirob {

using RMatrix = Eigen::MatrixXd;

struct KitaevParams {
  int n_sites = 2;
  double mu = 0.0;
  RVector tau0;  // length n_sites - 1
  RVector eta0;  // length n_sites - 1
  double sigma_tau = 0.0;
  double sigma_eta = 0.0;
  double t = 1.0;

  static KitaevParams uniform(int n_sites, double mu, double tau0, double eta0,
                              double sigma, double t);
  void validate() const;
  int bonds() const { return n_sites - 1; }
};

struct BdGModel {
  RMatrix A;  // symmetric hopping block
  RMatrix B;  // antisymmetric pairing block
  HermitianMatrix M;
  HermitianMatrix M_mu;
};

BdGModel build_bdg(const KitaevParams& p, const RVector& delta_tau,
                   const RVector& delta_eta);
BdGModel build_bdg(const KitaevParams& p);

// dM/dmu = diag(-I, I).
HermitianMatrix bdg_number_operator(int n_sites);

// dM/dtau_i for every bond, then dM/deta_i for every bond.
std::vector<HermitianMatrix> bdg_bond_operators(int n_sites);

struct NambuJ {
  CMatrix J;
  double time = 0.0;
};

// J = int_0^t e^{iMs} M_mu e^{-iMs} ds, so that G = (1/2) c^+ J c.
NambuJ qfig_j(const BdGModel& model, double t);

// Expectations of quadratic operators (1/2) c^+ X c in a number-eigenstate
// Gaussian sector, via Wick's theorem on C_ab = <c_a^+ c_b>.
class FermionSectorFunctional final : public ExpectationFunctional {
 public:
  enum class Sector { vacuum, filled };
  FermionSectorFunctional(int n_sites, Sector sector);
  Complex mean(const CMatrix& x) const override;
  Complex product(const CMatrix& x, const CMatrix& y) const override;

 private:
  CMatrix c_;     // C
  CMatrix cbar_;  // C with both indices conjugated, P C P
  CMatrix cp_;    // C P
  CMatrix pc_;    // P C
};

// GHZ = (|vacuum> + |filled>)/sqrt(2): cross-sector terms of quadratic and
// quartic operators vanish for N > 4, leaving the sector average.
class GhzFunctional final : public ExpectationFunctional {
 public:
  explicit GhzFunctional(int n_sites);
  Complex mean(const CMatrix& x) const override;
  Complex product(const CMatrix& x, const CMatrix& y) const override;

 private:
  FermionSectorFunctional vacuum_;
  FermionSectorFunctional filled_;
};

struct GhzMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// InvalidSize for N <= 4.
GhzMoments ghz_mean_var(const NambuJ& j, int n_sites);

RobustnessReport kitaev_robustness(const KitaevParams& p, int order = 2);

// Per-realization GHZ QFI; deltas are bond fluctuations (tau..., eta...).
class KitaevQfiModel final : public QfiModel {
 public:
  explicit KitaevQfiModel(KitaevParams p);
  std::size_t term_count() const override {
    return 2 * static_cast<std::size_t>(p_.bonds());
  }
  std::vector<DisorderDistribution> distributions() const override;
  double qfi(const RVector& deltas) const override;

 private:
  KitaevParams p_;
};

inline constexpr int kMaxJordanWignerSites = 12;

// Dense 2^N spin-space matrices; bit i of a basis index is the occupation
// of site i. TooLarge above 12 sites.
HermitianMatrix jw_dense_hamiltonian(const KitaevParams& p,
                                     const RVector& delta_tau,
                                     const RVector& delta_eta);
HermitianMatrix jw_dense_dmu(int n_sites);
PureState jw_ghz_state(int n_sites);

struct PlaneCell {
  double tau0 = 0.0;
  double eta0 = 0.0;
  double c2 = 0.0;
  ProbeClass classification = ProbeClass::DIP;
};

struct PlaneGrid {
  double tau_lo = 1.0, tau_hi = 6.0;
  double eta_lo = 1.0, eta_hi = 6.0;
  int tau_points = 40;
  int eta_points = 40;
};

// C^(2) over a uniform (tau0, eta0) grid, tau-major.
std::vector<PlaneCell> kitaev_plane_scan(int n_sites, double mu, double t,
                                         const PlaneGrid& grid,
                                         std::size_t workers = 0);

}  // namespace qfirob
