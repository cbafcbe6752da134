#include "qfirob/probe.hpp"

#include <cmath>
#include <numbers>

#include "qfirob/error.hpp"

namespace qfirob {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void require_dim(const HermitianMatrix& m, Index dim, const std::string& what) {
  if (m.dim() != dim) {
    throw Error(ErrorKind::DimensionMismatch,
                what + " has dim " + std::to_string(m.dim()) + ", expected " +
                    std::to_string(dim));
  }
}

}  // namespace

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::gaussian:
      return "gaussian";
    case DistributionKind::uniform:
      return "uniform";
    case DistributionKind::skew_normal:
      return "skew_normal";
  }
  return "gaussian";
}

DistributionKind distribution_kind_from_string(std::string_view name) {
  if (name == "gaussian") return DistributionKind::gaussian;
  if (name == "uniform") return DistributionKind::uniform;
  if (name == "skew_normal") return DistributionKind::skew_normal;
  throw Error(ErrorKind::InvalidDistribution,
              "unknown distribution '" + std::string(name) + "'");
}

DisorderDistribution::DisorderDistribution(DistributionKind kind, double mean,
                                           double sigma, double skewness)
    : kind_(kind), mean_(mean), sigma_(sigma), skewness_(skewness) {
  if (!std::isfinite(mean) || !std::isfinite(sigma) || sigma < 0.0) {
    throw Error(ErrorKind::InvalidDistribution,
                "sigma must be finite and nonnegative");
  }
  if (kind != DistributionKind::skew_normal) {
    skewness_ = 0.0;
    return;
  }
  if (!(std::abs(skewness) < kMaxSkewNormalSkewness)) {
    throw Error(ErrorKind::InvalidDistribution,
                "skew-normal skewness must satisfy |gamma| < 0.99527");
  }
  // Invert gamma(delta) in closed form.
  const double pi = std::numbers::pi;
  const double r = std::pow(2.0 * std::abs(skewness) / (4.0 - pi), 2.0 / 3.0);
  const double mu_z = std::sqrt(r / (1.0 + r));  // delta sqrt(2/pi)
  sn_delta_ = std::copysign(mu_z / std::sqrt(2.0 / pi), skewness);
  sn_omega_ = 1.0 / std::sqrt(1.0 - mu_z * mu_z);
  sn_xi_ = -sn_omega_ * std::copysign(mu_z, skewness);
}

DisorderDistribution DisorderDistribution::gaussian(double mean, double sigma) {
  return {DistributionKind::gaussian, mean, sigma, 0.0};
}

DisorderDistribution DisorderDistribution::uniform(double mean, double sigma) {
  return {DistributionKind::uniform, mean, sigma, 0.0};
}

DisorderDistribution DisorderDistribution::skew_normal(double mean,
                                                       double sigma,
                                                       double skewness) {
  return {DistributionKind::skew_normal, mean, sigma, skewness};
}

DisorderDistribution DisorderDistribution::with_sigma(double sigma) const {
  return {kind_, mean_, sigma, skewness_};
}

double DisorderDistribution::standardized_draw(std::mt19937_64& engine) const {
  switch (kind_) {
    case DistributionKind::gaussian: {
      std::normal_distribution<double> normal;
      return normal(engine);
    }
    case DistributionKind::uniform: {
      std::uniform_real_distribution<double> u01;
      return std::sqrt(3.0) * (2.0 * u01(engine) - 1.0);
    }
    case DistributionKind::skew_normal: {
      std::normal_distribution<double> normal;
      const double z0 = normal(engine);
      const double z1 = normal(engine);
      return sn_xi_ +
             sn_omega_ * (sn_delta_ * std::abs(z0) +
                          std::sqrt(1.0 - sn_delta_ * sn_delta_) * z1);
    }
  }
  return 0.0;
}

DisorderedProbeSpec::DisorderedProbeSpec(HermitianMatrix h_theta,
                                         HermitianMatrix dtheta_h,
                                         HermitianMatrix clean_rest,
                                         std::vector<DisorderTerm> terms,
                                         double encoding_time,
                                         PureState initial_state)
    : h_theta_(std::move(h_theta)),
      dtheta_h_(std::move(dtheta_h)),
      clean_rest_(std::move(clean_rest)),
      terms_(std::move(terms)),
      t_(encoding_time),
      state_(std::move(initial_state)) {
  const Index dim = h_theta_.dim();
  if (dim <= 0) throw Error(ErrorKind::InvalidSpec, "empty h_theta");
  require_dim(dtheta_h_, dim, "dtheta_h");
  require_dim(clean_rest_, dim, "clean_rest");
  for (const auto& term : terms_) require_dim(term.op, dim, "term " + term.label);
  if (state_.dim() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "initial state dim");
  }
  if (!(t_ > 0.0) || !std::isfinite(t_)) {
    throw Error(ErrorKind::InvalidSpec, "encoding time must be positive");
  }
}

std::vector<HermitianMatrix> DisorderedProbeSpec::term_operators() const {
  std::vector<HermitianMatrix> ops;
  ops.reserve(terms_.size());
  for (const auto& term : terms_) ops.push_back(term.op);
  return ops;
}

std::vector<DisorderDistribution> DisorderedProbeSpec::distributions() const {
  std::vector<DisorderDistribution> out;
  out.reserve(terms_.size());
  for (const auto& term : terms_) out.push_back(term.distribution);
  return out;
}

DisorderedProbeSpec DisorderedProbeSpec::with_state(PureState state) const {
  return {h_theta_, dtheta_h_, clean_rest_, terms_, t_, std::move(state)};
}

DisorderedProbeSpec DisorderedProbeSpec::with_time(double t) const {
  return {h_theta_, dtheta_h_, clean_rest_, terms_, t, state_};
}

DisorderedProbeSpec DisorderedProbeSpec::with_sigmas(
    std::span<const double> sigmas) const {
  if (sigmas.size() != terms_.size()) {
    throw Error(ErrorKind::LengthMismatch, "sigma vector length");
  }
  auto terms = terms_;
  for (std::size_t n = 0; n < terms.size(); ++n) {
    terms[n].distribution = terms[n].distribution.with_sigma(sigmas[n]);
  }
  return {h_theta_, dtheta_h_, clean_rest_, std::move(terms), t_, state_};
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t state = master_seed;
  const std::uint64_t a = splitmix64(state);
  state = a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(state);
}

HermitianMatrix clean_hamiltonian(const DisorderedProbeSpec& spec) {
  return spec.h_theta() + spec.clean_rest();
}

DisorderRealization sample_realization(
    std::span<const DisorderDistribution> distributions,
    std::uint64_t master_seed, std::uint64_t index) {
  std::mt19937_64 engine(realization_seed(master_seed, index));
  DisorderRealization r;
  r.seed_index = index;
  r.deltas.resize(static_cast<Index>(distributions.size()));
  for (std::size_t n = 0; n < distributions.size(); ++n) {
    // Draw even when sigma == 0 so term positions keep their stream slots.
    const double z = distributions[n].standardized_draw(engine);
    r.deltas(static_cast<Index>(n)) = distributions[n].sigma() * z;
  }
  return r;
}

DisorderRealization sample_realization(const DisorderedProbeSpec& spec,
                                       std::uint64_t master_seed,
                                       std::uint64_t index) {
  const auto dists = spec.distributions();
  return sample_realization(dists, master_seed, index);
}

HermitianMatrix realized_hamiltonian(const DisorderedProbeSpec& spec,
                                     const RVector& deltas) {
  if (static_cast<std::size_t>(deltas.size()) != spec.term_count()) {
    throw Error(ErrorKind::DimensionMismatch,
                "realization has " + std::to_string(deltas.size()) +
                    " deltas for " + std::to_string(spec.term_count()) +
                    " terms");
  }
  HermitianMatrix h = clean_hamiltonian(spec);
  for (std::size_t n = 0; n < spec.term_count(); ++n) {
    h += deltas(static_cast<Index>(n)) * spec.disorder_terms()[n].op;
  }
  return h;
}

HermitianMatrix realized_hamiltonian(const DisorderedProbeSpec& spec,
                                     const DisorderRealization& r) {
  return realized_hamiltonian(spec, r.deltas);
}

double central_moment(const DisorderDistribution& d, int r) {
  switch (r) {
    case 1:
      return 0.0;
    case 2:
      return d.sigma() * d.sigma();
    case 3:
      return d.skewness() * d.sigma() * d.sigma() * d.sigma();
    default:
      throw Error(ErrorKind::UnsupportedOrder,
                  "central moment of order " + std::to_string(r));
  }
}

}  // namespace qfirob
