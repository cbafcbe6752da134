#include "qfirob/monte_carlo.hpp"

#include <cmath>
#include <string>

#include "qfirob/error.hpp"
#include "qfirob/parallel.hpp"
#include "qfirob/qfi.hpp"

namespace qfirob {

double ProbeQfiModel::qfi(const RVector& deltas) const {
  const HermitianMatrix h = realized_hamiltonian(spec_, deltas);
  return qfirob::qfi(spec_.initial_state(),
                     qfig_exact(h, spec_.dtheta_h(), spec_.encoding_time()));
}

void McConfig::validate(std::size_t term_count) const {
  if (n_realizations < kMinRealizations) {
    throw Error(ErrorKind::InvalidConfig, "n_realizations must be >= 100");
  }
  if (sigma_grid.empty()) {
    throw Error(ErrorKind::InvalidConfig, "sigma_grid is empty");
  }
  for (std::size_t k = 0; k < sigma_grid.size(); ++k) {
    if (!(sigma_grid[k] > 0.0) || !std::isfinite(sigma_grid[k])) {
      throw Error(ErrorKind::InvalidConfig, "sigma_grid entries must be positive");
    }
    if (k > 0 && !(sigma_grid[k] > sigma_grid[k - 1])) {
      throw Error(ErrorKind::InvalidConfig,
                  "sigma_grid must be strictly ascending");
    }
  }
  if (!sigma_ratios.empty() && sigma_ratios.size() != term_count) {
    throw Error(ErrorKind::InvalidConfig,
                "sigma_ratios has " + std::to_string(sigma_ratios.size()) +
                    " entries for " + std::to_string(term_count) + " terms");
  }
  if (!(fit_cap > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "fit_cap must be positive");
  }
}

std::vector<double> McConfig::sigmas_at(double grid_value,
                                        std::size_t term_count) const {
  std::vector<double> s(term_count, grid_value);
  if (!sigma_ratios.empty()) {
    for (std::size_t n = 0; n < term_count; ++n) s[n] *= sigma_ratios[n];
  }
  return s;
}

QuenchedEstimate quenched_qfi(const QfiModel& model,
                              std::span<const double> sigmas,
                              const McConfig& cfg) {
  if (sigmas.size() != model.term_count()) {
    throw Error(ErrorKind::LengthMismatch, "sigma vector length");
  }
  if (cfg.n_realizations < kMinRealizations) {
    throw Error(ErrorKind::InvalidConfig, "n_realizations must be >= 100");
  }
  auto dists = model.distributions();
  for (std::size_t n = 0; n < dists.size(); ++n) {
    dists[n] = dists[n].with_sigma(sigmas[n]);
  }
  const auto values = parallel_map<double>(
      cfg.n_realizations,
      [&](std::size_t i) {
        return model.qfi(sample_realization(dists, cfg.master_seed, i).deltas);
      },
      cfg.workers);
  // Welford in index order: exact mean for constant samples.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double delta = values[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (values[i] - mean);
  }
  const double n = static_cast<double>(values.size());
  const double var = m2 / (n - 1.0);
  return {mean, std::sqrt(std::max(var, 0.0) / n)};
}

MarkerFit fit_marker(std::span<const double> sigmas, std::span<const double> g,
                     double fit_cap) {
  if (sigmas.size() != g.size()) {
    throw Error(ErrorKind::LengthMismatch, "sigma and marker lengths differ");
  }
  std::vector<double> x, y;
  double sign_sum = 0.0;
  MarkerFit fit;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = std::abs(g[k]);
    if (a > 0.0 && a < fit_cap && sigmas[k] > 0.0) {
      if (x.empty()) fit.window_lo = sigmas[k];
      fit.window_hi = sigmas[k];
      x.push_back(std::log(sigmas[k]));
      y.push_back(std::log(a));
      sign_sum += g[k];
    }
  }
  if (x.size() < 3) {
    throw Error(ErrorKind::InsufficientWindow,
                std::to_string(x.size()) + " grid points with |g| < " +
                    std::to_string(fit_cap));
  }
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double denom = m * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) {
    throw Error(ErrorKind::InsufficientWindow, "degenerate sigma window");
  }
  fit.points_used = x.size();
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.free_intercept = (sy - fit.slope * sx) / m;
  fit.intercept = (sy - 2.0 * sx) / m;
  const double sign = sign_sum < 0.0 ? -1.0 : 1.0;
  fit.c2_fit = sign * std::exp(fit.intercept);
  if (sign < 0.0) fit.sigma_max_fit = std::exp(-fit.intercept / 2.0);
  return fit;
}

McSweepResult marker_sweep(const QfiModel& model, const McConfig& cfg) {
  cfg.validate(model.term_count());
  McSweepResult out;
  out.n_realizations = cfg.n_realizations;
  out.f0 = model.clean_qfi();
  if (!(out.f0 > 1e-14)) {
    throw Error(ErrorKind::ZeroCleanQfi, "clean QFI vanishes");
  }
  std::vector<double> sig, g;
  for (double s : cfg.sigma_grid) {
    const auto sigmas = cfg.sigmas_at(s, model.term_count());
    const QuenchedEstimate est = quenched_qfi(model, sigmas, cfg);
    SweepPoint p{s, est.mean, est.std_error, est.mean / out.f0 - 1.0,
                 est.std_error / out.f0};
    out.points.push_back(p);
    sig.push_back(s);
    g.push_back(p.g_mean);
  }
  out.fit = fit_marker(sig, g, cfg.fit_cap);
  return out;
}

double crossover_scan(const std::function<double(double)>& marker,
                      std::span<const double> t_grid, double rel_tol) {
  if (t_grid.size() < 2) {
    throw Error(ErrorKind::NoSignChange, "grid has fewer than two points");
  }
  double lo = t_grid[0];
  double g_lo = marker(lo);
  if (g_lo == 0.0) return lo;
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double hi_t = t_grid[k];
    const double g_hi = marker(hi_t);
    if (g_hi == 0.0) return hi_t;
    if ((g_lo < 0.0) != (g_hi < 0.0)) {
      double a = lo, b = hi_t, ga = g_lo;
      while (std::abs(b - a) > rel_tol * std::abs(0.5 * (a + b))) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const double gm = marker(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (ga < 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi_t;
    g_lo = g_hi;
  }
  throw Error(ErrorKind::NoSignChange,
              "marker keeps one sign over [" + std::to_string(t_grid.front()) +
                  ", " + std::to_string(t_grid.back()) + "]");
}

}  // namespace qfirob
