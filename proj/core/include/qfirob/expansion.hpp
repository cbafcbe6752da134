#pragma once

// Expansion of the QFI generator of H_0 + sum_n a_n H_n in powers of the
// fluctuations a_n, the quenched-average coefficients built from it, and the
// robustness report derived from the clean Hamiltonian alone.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qfirob/kernels.hpp"
#include "qfirob/linalg.hpp"
#include "qfirob/probe.hpp"

namespace qfirob {

enum class ContractionRoute {
  factored,      // O(d^3) per term, kernels evaluated on the fly
  materialized,  // O(d^4) per term over build_kernels tensors, d <= 64
};

struct ExpansionTerms {
  HermitianMatrix g0;
  std::vector<HermitianMatrix> g1;
  std::vector<HermitianMatrix> g2;  // diagonal second order, one per term
  std::optional<std::vector<CMatrix>> g3;
  double time = 0.0;

  std::size_t term_count() const noexcept { return g1.size(); }
};

// Order 2 or 3; operators share the dimension of h0.
ExpansionTerms build_expansion(const HermitianMatrix& h0,
                               const HermitianMatrix& dtheta_h,
                               std::span<const HermitianMatrix> ops, double t,
                               int order,
                               ContractionRoute route = ContractionRoute::factored);
ExpansionTerms build_expansion(const DisorderedProbeSpec& spec, int order,
                               ContractionRoute route = ContractionRoute::factored);

// Order-n coefficient of the generator of H_0 + a N, in the eigenbasis of H_0,
// from the time-ordered Duhamel series summed over every left/right
// placement of N. Cost O(d^(n+2)); n in 1..3.
CMatrix dyson_coefficient_eigen(const RVector& energies, const CMatrix& d_eigen,
                                const CMatrix& n_eigen, double t, int order);

// Expectation values <X> and <X Y> of the operators represented by X, Y.
class ExpectationFunctional {
 public:
  virtual ~ExpectationFunctional() = default;
  virtual Complex mean(const CMatrix& x) const = 0;
  virtual Complex product(const CMatrix& x, const CMatrix& y) const = 0;
};

class PureStateFunctional final : public ExpectationFunctional {
 public:
  explicit PureStateFunctional(PureState psi) : psi_(std::move(psi)) {}
  Complex mean(const CMatrix& x) const override;
  Complex product(const CMatrix& x, const CMatrix& y) const override;

 private:
  PureState psi_;
};

// Coefficients of a, a^2, a^3 in Var(G(a)) for a single fluctuating term n.
double tilde_g1(const ExpansionTerms& terms, const ExpectationFunctional& f,
                std::size_t n);
double tilde_g2(const ExpansionTerms& terms, const ExpectationFunctional& f,
                std::size_t n);
double tilde_g3(const ExpansionTerms& terms, const ExpectationFunctional& f,
                std::size_t n);
double tilde_g2(const ExpansionTerms& terms, const PureState& psi,
                std::size_t n);

enum class ProbeClass { DIP, DSP, DEP };
std::string_view to_string(ProbeClass c);

// |C^(2)| below this is reported as disorder-immune.
inline constexpr double kClassificationEps = 1e-10;
// Clean QFI at or below this leaves the marker undefined.
inline constexpr double kMinCleanQfi = 1e-14;

struct RobustnessReport {
  double f0 = 0.0;
  std::vector<double> c2_per_term;
  double c2_total = 0.0;
  std::optional<std::vector<double>> c3_per_term;
  std::optional<double> c3_total;
  std::optional<double> c32;
  std::optional<double> sigma_max;  // present iff DSP
  ProbeClass classification = ProbeClass::DIP;
};

RobustnessReport make_report(const ExpansionTerms& terms,
                             const ExpectationFunctional& f);
RobustnessReport robustness_report(const DisorderedProbeSpec& spec,
                                   int order = 2);

// sum_n sigma_n^2 C_n^(2) [+ sum_n gamma_n sigma_n^3 C_n^(3)].
double predicted_marker(const RobustnessReport& report,
                        std::span<const double> sigmas,
                        std::optional<std::span<const double>> gammas = {});

struct ResilienceOptimum {
  std::vector<double> parameters;
  double abs_marker = 0.0;
};

using StateFamily = std::function<PureState(std::span<const double>)>;

// Exhaustive grid search for the family member minimizing |g| at the spec's
// per-term sigmas. Members with vanishing clean QFI are skipped.
ResilienceOptimum optimize_resilience(
    const DisorderedProbeSpec& spec, const StateFamily& family,
    const std::vector<std::vector<double>>& grid);

}  // namespace qfirob
