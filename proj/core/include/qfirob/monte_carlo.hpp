#pragma once

// Quenched (disorder-averaged) QFI by Monte Carlo, the numerical disorder
// marker over a sigma grid, its log-log fit, and sign-change scans.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qfirob/probe.hpp"

namespace qfirob {

// Exact per-realization QFI of a disordered probe.
class QfiModel {
 public:
  virtual ~QfiModel() = default;
  virtual std::size_t term_count() const = 0;
  // Per-term laws; MC runs override their sigmas.
  virtual std::vector<DisorderDistribution> distributions() const = 0;
  virtual double qfi(const RVector& deltas) const = 0;
  double clean_qfi() const {
    return qfi(RVector::Zero(static_cast<Index>(term_count())));
  }
};

class ProbeQfiModel final : public QfiModel {
 public:
  explicit ProbeQfiModel(DisorderedProbeSpec spec) : spec_(std::move(spec)) {}
  std::size_t term_count() const override { return spec_.term_count(); }
  std::vector<DisorderDistribution> distributions() const override {
    return spec_.distributions();
  }
  double qfi(const RVector& deltas) const override;

 private:
  DisorderedProbeSpec spec_;
};

inline constexpr std::size_t kMinRealizations = 100;
inline constexpr double kDefaultFitCap = 0.1;

struct McConfig {
  std::size_t n_realizations = 100000;
  std::uint64_t master_seed = 0;
  std::vector<double> sigma_grid;
  std::vector<double> sigma_ratios;  // empty means 1 for every term
  double fit_cap = kDefaultFitCap;
  std::size_t workers = 0;  // 0: worker_count()

  // Throws InvalidConfig naming the offending field.
  void validate(std::size_t term_count) const;
  std::vector<double> sigmas_at(double grid_value, std::size_t term_count) const;
};

struct QuenchedEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

QuenchedEstimate quenched_qfi(const QfiModel& model,
                              std::span<const double> sigmas,
                              const McConfig& cfg);

struct SweepPoint {
  double sigma = 0.0;
  double f_mean = 0.0;
  double f_stderr = 0.0;
  double g_mean = 0.0;
  double g_stderr = 0.0;
};

struct MarkerFit {
  double slope = 0.0;            // free least-squares slope of ln|g| vs ln sigma
  double free_intercept = 0.0;   // intercept of that free fit
  double intercept = 0.0;        // intercept with the slope held at 2
  double c2_fit = 0.0;           // sign(g) e^{intercept}
  std::optional<double> sigma_max_fit;  // e^{-intercept/2} when g < 0
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t points_used = 0;
};

struct McSweepResult {
  std::vector<SweepPoint> points;
  std::size_t n_realizations = 0;
  double f0 = 0.0;
  MarkerFit fit;
};

// Fits over {sigma : 0 < |g(sigma)| < fit_cap}; InsufficientWindow below 3
// points.
MarkerFit fit_marker(std::span<const double> sigmas, std::span<const double> g,
                     double fit_cap = kDefaultFitCap);

McSweepResult marker_sweep(const QfiModel& model, const McConfig& cfg);

// First sign change of `marker` on the ascending grid, refined by bisection
// until the bracket is below rel_tol times its midpoint.
double crossover_scan(const std::function<double(double)>& marker,
                      std::span<const double> t_grid, double rel_tol = 1e-12);

}  // namespace qfirob
