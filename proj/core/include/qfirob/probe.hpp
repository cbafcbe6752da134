#pragma once

// Disordered probe Hamiltonians H = H_0 + sum_n dphi_n H_n and counter-based
// sampling of disorder realizations.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qfirob/linalg.hpp"

namespace qfirob {

enum class DistributionKind { gaussian, uniform, skew_normal };

std::string_view to_string(DistributionKind kind);
DistributionKind distribution_kind_from_string(std::string_view name);

// Largest |skewness| a skew-normal law can reach.
inline constexpr double kMaxSkewNormalSkewness = 0.99527;

class DisorderDistribution {
 public:
  static DisorderDistribution gaussian(double mean, double sigma);
  // Uniform on [mean - sqrt(3) sigma, mean + sqrt(3) sigma].
  static DisorderDistribution uniform(double mean, double sigma);
  static DisorderDistribution skew_normal(double mean, double sigma,
                                          double skewness);

  DistributionKind kind() const noexcept { return kind_; }
  double mean() const noexcept { return mean_; }
  double sigma() const noexcept { return sigma_; }
  double skewness() const noexcept { return skewness_; }

  DisorderDistribution with_sigma(double sigma) const;

  // Zero-mean, unit-variance draw with this law's skewness. A fluctuation is
  // sigma * standardized_draw, so the same stream serves every sigma.
  double standardized_draw(std::mt19937_64& engine) const;

 private:
  DisorderDistribution(DistributionKind kind, double mean, double sigma,
                       double skewness);

  DistributionKind kind_ = DistributionKind::gaussian;
  double mean_ = 0.0;
  double sigma_ = 0.0;
  double skewness_ = 0.0;
  // Skew-normal shape in standardized form: X = xi + omega (d |Z0| +
  // sqrt(1 - d^2) Z1).
  double sn_delta_ = 0.0;
  double sn_omega_ = 1.0;
  double sn_xi_ = 0.0;
};

struct DisorderTerm {
  HermitianMatrix op;
  DisorderDistribution distribution;
  std::string label;
};

class DisorderedProbeSpec {
 public:
  DisorderedProbeSpec(HermitianMatrix h_theta, HermitianMatrix dtheta_h,
                      HermitianMatrix clean_rest,
                      std::vector<DisorderTerm> disorder_terms,
                      double encoding_time, PureState initial_state);

  const HermitianMatrix& h_theta() const noexcept { return h_theta_; }
  const HermitianMatrix& dtheta_h() const noexcept { return dtheta_h_; }
  const HermitianMatrix& clean_rest() const noexcept { return clean_rest_; }
  const std::vector<DisorderTerm>& disorder_terms() const noexcept {
    return terms_;
  }
  double encoding_time() const noexcept { return t_; }
  const PureState& initial_state() const noexcept { return state_; }
  Index dim() const noexcept { return h_theta_.dim(); }
  std::size_t term_count() const noexcept { return terms_.size(); }

  std::vector<HermitianMatrix> term_operators() const;
  std::vector<DisorderDistribution> distributions() const;

  DisorderedProbeSpec with_state(PureState state) const;
  DisorderedProbeSpec with_time(double t) const;
  // Replaces every term's sigma; length must match the term count.
  DisorderedProbeSpec with_sigmas(std::span<const double> sigmas) const;

 private:
  HermitianMatrix h_theta_;
  HermitianMatrix dtheta_h_;
  HermitianMatrix clean_rest_;
  std::vector<DisorderTerm> terms_;
  double t_;
  PureState state_;
};

struct DisorderRealization {
  RVector deltas;  // fluctuation phi_n - phi_{0,n}, one per term
  std::uint64_t seed_index = 0;
};

// Seed of the per-realization engine; depends only on (master_seed, index).
std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index);

HermitianMatrix clean_hamiltonian(const DisorderedProbeSpec& spec);

DisorderRealization sample_realization(
    std::span<const DisorderDistribution> distributions,
    std::uint64_t master_seed, std::uint64_t index);
DisorderRealization sample_realization(const DisorderedProbeSpec& spec,
                                       std::uint64_t master_seed,
                                       std::uint64_t index);

HermitianMatrix realized_hamiltonian(const DisorderedProbeSpec& spec,
                                     const DisorderRealization& r);
HermitianMatrix realized_hamiltonian(const DisorderedProbeSpec& spec,
                                     const RVector& deltas);

double central_moment(const DisorderDistribution& d, int r);

}  // namespace qfirob
