#include "qfirob/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "qfirob/config.hpp"
#include "qfirob/error.hpp"
#include "qfirob/matrix_io.hpp"

#ifndef QFIROB_VERSION
#define QFIROB_VERSION "0.0.0"
#endif

namespace qfirob {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::report:
      return "report";
    case Experiment::sweep_sigma:
      return "sweep-sigma";
    case Experiment::single_qubit:
      return "single-qubit";
    case Experiment::kitaev_plane:
      return "kitaev-plane";
    case Experiment::crossover:
      return "crossover";
    case Experiment::mc_validate:
      return "mc-validate";
  }
  return "report";
}

std::optional<Experiment> experiment_from_string(std::string_view name) {
  for (auto e : {Experiment::report, Experiment::sweep_sigma,
                 Experiment::single_qubit, Experiment::kitaev_plane,
                 Experiment::crossover, Experiment::mc_validate}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

std::string tool_version() { return QFIROB_VERSION; }

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string short_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string optional_number(const std::optional<double>& v) {
  return v ? short_number(*v) : "na";
}

// ---- config ----------------------------------------------------------------

constexpr std::string_view kRun = "run";
constexpr std::string_view kSingle = "single_qubit";
constexpr std::string_view kKitaev = "kitaev";
constexpr std::string_view kMatrix = "matrix";
constexpr std::string_view kMc = "mc";
constexpr std::string_view kCross = "crossover";

DisorderDistribution parse_law(const ConfigFile& cfg, std::string_view section,
                               double mean, double sigma) {
  DistributionKind kind = DistributionKind::gaussian;
  if (cfg.has(section, "distribution")) {
    try {
      kind = distribution_kind_from_string(cfg.get_string(section, "distribution"));
    } catch (const Error&) {
      cfg.fail(section, "distribution",
               "expected gaussian, uniform or skew_normal");
    }
  }
  if (sigma < 0.0) cfg.fail(section, "sigma", "must be non-negative");
  const double skew = cfg.get_double(section, "skewness", 0.0);
  if (kind != DistributionKind::skew_normal && skew != 0.0) {
    cfg.fail(section, "skewness", "only valid with distribution = skew_normal");
  }
  try {
    switch (kind) {
      case DistributionKind::uniform:
        return DisorderDistribution::uniform(mean, sigma);
      case DistributionKind::skew_normal:
        return DisorderDistribution::skew_normal(mean, sigma, skew);
      case DistributionKind::gaussian:
        break;
    }
    return DisorderDistribution::gaussian(mean, sigma);
  } catch (const Error& e) {
    cfg.fail(section, kind == DistributionKind::skew_normal ? "skewness" : "sigma",
             e.what());
  }
}

double positive(const ConfigFile& cfg, std::string_view section,
                std::string_view key, double fallback) {
  const double v = cfg.get_double(section, key, fallback);
  if (!(v > 0.0)) cfg.fail(section, key, "must be positive");
  return v;
}

double non_negative(const ConfigFile& cfg, std::string_view section,
                    std::string_view key) {
  const double v = cfg.get_double(section, key, 0.0);
  if (v < 0.0) cfg.fail(section, key, "must be non-negative");
  return v;
}

SingleQubitProbe parse_single_qubit(const ConfigFile& cfg) {
  cfg.require_known(kSingle, {"h0z", "t", "beta", "sigma_x", "sigma_y",
                              "sigma_z", "distribution", "skewness",
                              "beta_points"});
  SingleQubitProbe p;
  p.params.h0z = cfg.get_double(kSingle, "h0z");
  p.params.t = positive(cfg, kSingle, "t", 1.0);
  p.disorder.sigma_x = non_negative(cfg, kSingle, "sigma_x");
  p.disorder.sigma_y = non_negative(cfg, kSingle, "sigma_y");
  p.disorder.sigma_z = non_negative(cfg, kSingle, "sigma_z");
  const auto law = parse_law(cfg, kSingle, 0.0, 1.0);
  p.disorder.kind = law.kind();
  p.disorder.skewness = law.skewness();
  p.beta_points = static_cast<int>(cfg.get_int(kSingle, "beta_points", 181));
  if (p.beta_points < 2) cfg.fail(kSingle, "beta_points", "must be >= 2");

  const std::string beta =
      cfg.has(kSingle, "beta") ? cfg.get_string(kSingle, "beta") : "optimal";
  if (beta == "optimal") {
    p.optimal_beta = true;
    p.params.beta =
        p.disorder.sigma_x == p.disorder.sigma_y
            ? 0.0
            : select_beta(p.disorder.sigma_x, p.disorder.sigma_y, p.params);
  } else {
    p.params.beta = cfg.get_double(kSingle, "beta");
  }
  return p;
}

RVector bond_values(const ConfigFile& cfg, std::string_view key, int bonds) {
  const auto v = cfg.get_list(kKitaev, key);
  if (v.size() == 1) return RVector::Constant(bonds, v[0]);
  if (static_cast<int>(v.size()) != bonds) {
    cfg.fail(kKitaev, key,
             "needs 1 or n_sites - 1 = " + std::to_string(bonds) + " values");
  }
  return Eigen::Map<const RVector>(v.data(), bonds);
}

KitaevProbe parse_kitaev(const ConfigFile& cfg) {
  cfg.require_known(kKitaev, {"n_sites", "mu", "tau0", "eta0", "sigma",
                              "sigma_tau", "sigma_eta", "t", "tau_lo", "tau_hi",
                              "eta_lo", "eta_hi", "tau_points", "eta_points"});
  KitaevProbe k;
  auto& p = k.params;
  const auto n = cfg.get_int(kKitaev, "n_sites");
  if (n < 2 || n > 1000) cfg.fail(kKitaev, "n_sites", "must be in [2, 1000]");
  p.n_sites = static_cast<int>(n);
  p.mu = cfg.get_double(kKitaev, "mu");
  p.tau0 = bond_values(cfg, "tau0", p.bonds());
  p.eta0 = bond_values(cfg, "eta0", p.bonds());
  p.t = positive(cfg, kKitaev, "t", 1.0);
  if (cfg.has(kKitaev, "sigma") &&
      (cfg.has(kKitaev, "sigma_tau") || cfg.has(kKitaev, "sigma_eta"))) {
    cfg.fail(kKitaev, "sigma", "conflicts with sigma_tau / sigma_eta");
  }
  const double sigma = non_negative(cfg, kKitaev, "sigma");
  p.sigma_tau = cfg.has(kKitaev, "sigma") ? sigma : non_negative(cfg, kKitaev, "sigma_tau");
  p.sigma_eta = cfg.has(kKitaev, "sigma") ? sigma : non_negative(cfg, kKitaev, "sigma_eta");

  auto& g = k.grid;
  g.tau_lo = cfg.get_double(kKitaev, "tau_lo", g.tau_lo);
  g.tau_hi = cfg.get_double(kKitaev, "tau_hi", g.tau_hi);
  g.eta_lo = cfg.get_double(kKitaev, "eta_lo", g.eta_lo);
  g.eta_hi = cfg.get_double(kKitaev, "eta_hi", g.eta_hi);
  g.tau_points = static_cast<int>(cfg.get_int(kKitaev, "tau_points", g.tau_points));
  g.eta_points = static_cast<int>(cfg.get_int(kKitaev, "eta_points", g.eta_points));
  if (!(g.tau_hi > g.tau_lo)) cfg.fail(kKitaev, "tau_hi", "must exceed tau_lo");
  if (!(g.eta_hi > g.eta_lo)) cfg.fail(kKitaev, "eta_hi", "must exceed eta_lo");
  if (g.tau_points < 1) cfg.fail(kKitaev, "tau_points", "must be >= 1");
  if (g.eta_points < 1) cfg.fail(kKitaev, "eta_points", "must be >= 1");
  return k;
}

MatrixProbe parse_matrix(const ConfigFile& cfg, const fs::path& base) {
  cfg.require_known(kMatrix, {"h_theta", "dtheta_h", "clean_rest", "state", "t",
                              "terms"});
  MatrixProbe m{DisorderedProbeSpec(HermitianMatrix::identity(1),
                                    HermitianMatrix::identity(1),
                                    HermitianMatrix::zero(1), {}, 1.0,
                                    PureState::basis_state(1, 0)),
                {}};
  auto path_of = [&](std::string_view section, std::string_view key) {
    const std::string text = cfg.get_string(section, key);
    m.files.push_back(text);
    const fs::path p(text);
    return p.is_absolute() ? p : base / p;
  };
  auto load_op = [&](std::string_view section, std::string_view key) {
    const CMatrix raw = load_matrix(path_of(section, key));
    return HermitianMatrix(raw);
  };

  const HermitianMatrix h_theta = load_op(kMatrix, "h_theta");
  const HermitianMatrix dtheta = load_op(kMatrix, "dtheta_h");
  const HermitianMatrix rest = cfg.has(kMatrix, "clean_rest")
                                   ? load_op(kMatrix, "clean_rest")
                                   : HermitianMatrix::zero(h_theta.dim());
  const PureState state(load_vector(path_of(kMatrix, "state")));
  const double t = positive(cfg, kMatrix, "t", 1.0);

  std::vector<DisorderTerm> terms;
  for (const auto& label : cfg.get_names(kMatrix, "terms")) {
    const std::string section = "term." + label;
    if (!cfg.has_section(section)) {
      cfg.fail(kMatrix, "terms", "no [" + section + "] section");
    }
    cfg.require_known(section,
                      {"op", "mean", "sigma", "distribution", "skewness"});
    const double sigma = cfg.get_double(section, "sigma");
    terms.push_back({load_op(section, "op"),
                     parse_law(cfg, section, cfg.get_double(section, "mean", 0.0),
                               sigma),
                     label});
  }
  m.spec = DisorderedProbeSpec(h_theta, dtheta, rest, std::move(terms), t, state);
  return m;
}

DisorderedProbeSpec active_single_qubit_spec(const SingleQubitProbe& p) {
  const DisorderedProbeSpec full = single_qubit_spec(p.params, p.disorder);
  std::vector<DisorderTerm> active;
  for (const auto& term : full.disorder_terms()) {
    if (term.distribution.sigma() > 0.0) active.push_back(term);
  }
  if (active.empty()) {
    throw Error(ErrorKind::InvalidConfig,
                "[single_qubit] needs at least one positive sigma_x/y/z");
  }
  return DisorderedProbeSpec(full.h_theta(), full.dtheta_h(), full.clean_rest(),
                             std::move(active), full.encoding_time(),
                             full.initial_state());
}

std::size_t probe_term_count(const Probe& probe) {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SingleQubitProbe>) {
          return active_single_qubit_spec(p).term_count();
        } else if constexpr (std::is_same_v<T, KitaevProbe>) {
          return 2 * static_cast<std::size_t>(p.params.bonds());
        } else {
          return p.spec.term_count();
        }
      },
      probe);
}

McConfig parse_mc(const ConfigFile& cfg, std::size_t term_count) {
  cfg.require_known(kMc, {"n_realizations", "sigma_grid", "sigma_ratios",
                          "fit_cap", "workers"});
  McConfig mc;
  const auto n = cfg.get_int(kMc, "n_realizations",
                             static_cast<std::int64_t>(mc.n_realizations));
  if (n < static_cast<std::int64_t>(kMinRealizations)) {
    cfg.fail(kMc, "n_realizations", "must be >= 100");
  }
  mc.n_realizations = static_cast<std::size_t>(n);
  mc.sigma_grid = cfg.get_list(kMc, "sigma_grid");
  for (std::size_t k = 0; k < mc.sigma_grid.size(); ++k) {
    if (!(mc.sigma_grid[k] > 0.0)) {
      cfg.fail(kMc, "sigma_grid", "entries must be positive");
    }
    if (k > 0 && !(mc.sigma_grid[k] > mc.sigma_grid[k - 1])) {
      cfg.fail(kMc, "sigma_grid", "must be strictly ascending");
    }
  }
  if (cfg.has(kMc, "sigma_ratios")) {
    mc.sigma_ratios = cfg.get_list(kMc, "sigma_ratios");
    if (mc.sigma_ratios.size() != term_count) {
      cfg.fail(kMc, "sigma_ratios",
               "needs one entry per disorder term (" +
                   std::to_string(term_count) + ")");
    }
    for (double r : mc.sigma_ratios) {
      if (r < 0.0) cfg.fail(kMc, "sigma_ratios", "entries must be non-negative");
    }
  }
  mc.fit_cap = positive(cfg, kMc, "fit_cap", kDefaultFitCap);
  const auto workers = cfg.get_int(kMc, "workers", 0);
  if (workers < 0) cfg.fail(kMc, "workers", "must be non-negative");
  mc.workers = static_cast<std::size_t>(workers);
  mc.validate(term_count);
  return mc;
}

CrossoverSettings parse_crossover(const ConfigFile& cfg, double default_h) {
  cfg.require_known(kCross, {"h0z", "t_lo", "t_hi", "t_points"});
  CrossoverSettings c;
  c.h0z = cfg.has(kCross, "h0z") ? cfg.get_list(kCross, "h0z")
                                 : std::vector<double>{default_h};
  for (double h : c.h0z) {
    if (h == 0.0) cfg.fail(kCross, "h0z", "fields must be non-zero");
  }
  c.t_lo = positive(cfg, kCross, "t_lo", c.t_lo);
  c.t_hi = cfg.get_double(kCross, "t_hi", c.t_hi);
  if (!(c.t_hi > c.t_lo)) cfg.fail(kCross, "t_hi", "must exceed t_lo");
  c.t_points = static_cast<int>(cfg.get_int(kCross, "t_points", c.t_points));
  if (c.t_points < 2) cfg.fail(kCross, "t_points", "must be >= 2");
  return c;
}

bool needs_mc(Experiment e) {
  return e == Experiment::sweep_sigma || e == Experiment::mc_validate;
}

}  // namespace

RunConfig load_run_config(const fs::path& path, const RunOverrides& overrides) {
  const ConfigFile cfg = ConfigFile::load(path);
  for (const auto& s : cfg.sections()) {
    const bool known = s.name == kRun || s.name == kSingle || s.name == kKitaev ||
                       s.name == kMatrix || s.name == kMc || s.name == kCross ||
                       s.name.rfind("term.", 0) == 0;
    if (!known) cfg.fail_at(s.line, "unknown section [" + s.name + "]");
  }
  cfg.require_known(kRun, {"experiment", "seed", "output", "order"});

  RunConfig rc;
  std::optional<Experiment> from_file;
  if (cfg.has(kRun, "experiment")) {
    from_file = experiment_from_string(cfg.get_string(kRun, "experiment"));
    if (!from_file) cfg.fail(kRun, "experiment", "unknown experiment");
  }
  if (!overrides.experiment && !from_file) {
    cfg.fail_at(cfg.section_line(kRun), "[run] experiment is not set");
  }
  rc.experiment = overrides.experiment ? *overrides.experiment : *from_file;
  rc.seed = overrides.seed ? *overrides.seed
                           : (cfg.has(kRun, "seed") ? cfg.get_u64(kRun, "seed") : 0);
  rc.output = overrides.output ? *overrides.output
                               : fs::path(cfg.has(kRun, "output")
                                              ? cfg.get_string(kRun, "output")
                                              : ".");
  rc.order = static_cast<int>(cfg.get_int(kRun, "order", 2));
  if (rc.order != 2 && rc.order != 3) cfg.fail(kRun, "order", "must be 2 or 3");

  const int probes = int(cfg.has_section(kSingle)) + int(cfg.has_section(kKitaev)) +
                     int(cfg.has_section(kMatrix));
  if (probes != 1) {
    cfg.fail_at(0, "exactly one probe section ([single_qubit], [kitaev] or "
                   "[matrix]) is required, found " + std::to_string(probes));
  }
  if (cfg.has_section(kSingle)) {
    rc.probe = parse_single_qubit(cfg);
  } else if (cfg.has_section(kKitaev)) {
    rc.probe = parse_kitaev(cfg);
  } else {
    rc.probe = parse_matrix(cfg, path.parent_path());
  }

  const bool single = std::holds_alternative<SingleQubitProbe>(rc.probe);
  if ((rc.experiment == Experiment::single_qubit ||
       rc.experiment == Experiment::crossover) && !single) {
    cfg.fail_at(0, "experiment '" + std::string(to_string(rc.experiment)) +
                       "' requires a [single_qubit] section");
  }
  if (rc.experiment == Experiment::kitaev_plane &&
      !std::holds_alternative<KitaevProbe>(rc.probe)) {
    cfg.fail_at(0, "experiment 'kitaev-plane' requires a [kitaev] section");
  }
  if (single && rc.experiment != Experiment::crossover) {
    const auto& d = std::get<SingleQubitProbe>(rc.probe).disorder;
    if (d.sigma_x == 0.0 && d.sigma_y == 0.0 && d.sigma_z == 0.0) {
      cfg.fail(kSingle, "sigma_x", "at least one of sigma_x/y/z must be positive");
    }
  }

  if (needs_mc(rc.experiment) && !cfg.has_section(kMc)) {
    cfg.fail_at(0, "experiment '" + std::string(to_string(rc.experiment)) +
                       "' requires an [mc] section");
  }
  if (cfg.has_section(kMc)) {
    rc.has_mc = true;
    rc.mc = parse_mc(cfg, probe_term_count(rc.probe));
    rc.mc.master_seed = rc.seed;
  }
  if (single) {
    rc.crossover =
        parse_crossover(cfg, std::get<SingleQubitProbe>(rc.probe).params.h0z);
  } else if (cfg.has_section(kCross)) {
    cfg.fail_at(cfg.section_line(kCross), "[crossover] needs a single-qubit probe");
  }

  std::error_code ec;
  fs::create_directories(rc.output, ec);
  if (ec || !fs::is_directory(rc.output)) {
    throw Error(ErrorKind::ConfigError,
                "output directory '" + rc.output.string() + "' is not usable");
  }
  return rc;
}

// ---- models ------------------------------------------------------------------

ProbeModel make_probe_model(const Probe& probe) {
  ProbeModel pm;
  std::vector<double> sigmas;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SingleQubitProbe>) {
          const auto spec = active_single_qubit_spec(p);
          for (const auto& d : spec.distributions()) sigmas.push_back(d.sigma());
          pm.model = std::make_unique<ProbeQfiModel>(spec);
        } else if constexpr (std::is_same_v<T, KitaevProbe>) {
          sigmas.assign(static_cast<std::size_t>(p.params.bonds()), p.params.sigma_tau);
          sigmas.resize(2 * sigmas.size(), p.params.sigma_eta);
          pm.model = std::make_unique<KitaevQfiModel>(p.params);
        } else {
          for (const auto& d : p.spec.distributions()) sigmas.push_back(d.sigma());
          pm.model = std::make_unique<ProbeQfiModel>(p.spec);
        }
      },
      probe);
  const double top = sigmas.empty() ? 0.0 : *std::max_element(sigmas.begin(), sigmas.end());
  pm.sigma_ratios.assign(sigmas.size(), 1.0);
  if (top > 0.0) {
    for (std::size_t n = 0; n < sigmas.size(); ++n) pm.sigma_ratios[n] = sigmas[n] / top;
  }
  return pm;
}

RobustnessReport probe_report(const Probe& probe, int order) {
  return std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SingleQubitProbe>) {
          return robustness_report(active_single_qubit_spec(p), order);
        } else if constexpr (std::is_same_v<T, KitaevProbe>) {
          return kitaev_robustness(p.params, order);
        } else {
          return robustness_report(p.spec, order);
        }
      },
      probe);
}

// ---- artifacts -------------------------------------------------------------

namespace {

Json vector_json(const RVector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json law_json(const DisorderDistribution& d) {
  Json j;
  j["distribution"] = std::string(to_string(d.kind()));
  j["mean"] = d.mean();
  j["sigma"] = d.sigma();
  j["skewness"] = d.skewness();
  return j;
}

}  // namespace

std::string probe_echo_json(const Probe& probe) {
  Json j;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SingleQubitProbe>) {
          j["probe"] = "single_qubit";
          j["h0z"] = p.params.h0z;
          j["t"] = p.params.t;
          j["beta"] = p.params.beta;
          j["beta_rule"] = p.optimal_beta ? "optimal" : "fixed";
          j["sigma_x"] = p.disorder.sigma_x;
          j["sigma_y"] = p.disorder.sigma_y;
          j["sigma_z"] = p.disorder.sigma_z;
          j["distribution"] = std::string(to_string(p.disorder.kind));
          j["skewness"] = p.disorder.skewness;
        } else if constexpr (std::is_same_v<T, KitaevProbe>) {
          j["probe"] = "kitaev";
          j["n_sites"] = p.params.n_sites;
          j["mu"] = p.params.mu;
          j["tau0"] = vector_json(p.params.tau0);
          j["eta0"] = vector_json(p.params.eta0);
          j["sigma_tau"] = p.params.sigma_tau;
          j["sigma_eta"] = p.params.sigma_eta;
          j["t"] = p.params.t;
        } else {
          j["probe"] = "matrix";
          j["dim"] = p.spec.dim();
          j["t"] = p.spec.encoding_time();
          j["files"] = p.files;
          Json terms = Json::array();
          for (const auto& term : p.spec.disorder_terms()) {
            Json tj = law_json(term.distribution);
            tj["label"] = term.label;
            terms.push_back(tj);
          }
          j["terms"] = terms;
        }
      },
      probe);
  return j.dump();
}

std::string report_json(const RobustnessReport& r, const ReportMeta& meta) {
  auto opt = [](const std::optional<double>& v) -> Json {
    return v ? Json(*v) : Json(nullptr);
  };
  Json j;
  j["f0"] = r.f0;
  j["c2_per_term"] = r.c2_per_term;
  j["c2_total"] = r.c2_total;
  j["c3_total"] = opt(r.c3_total);
  j["c32"] = opt(r.c32);
  j["sigma_max"] = opt(r.sigma_max);
  j["classification"] = std::string(to_string(r.classification));
  j["probe_echo"] = Json::parse(meta.probe_echo_json);
  j["tool_version"] = tool_version();
  j["seed"] = meta.seed;
  return j.dump(2) + "\n";
}

std::string sweep_csv(const McSweepResult& result) {
  std::string out = "sigma,g_mean,g_stderr,f_mean,n_realizations\n";
  for (const auto& p : result.points) {
    out += csv_number(p.sigma) + "," + csv_number(p.g_mean) + "," +
           csv_number(p.g_stderr) + "," + csv_number(p.f_mean) + "," +
           std::to_string(result.n_realizations) + "\n";
  }
  const auto& fit = result.fit;
  out += "# fit: slope=" + csv_number(fit.slope) +
         " intercept=" + csv_number(fit.intercept) + " sigma_max=" +
         (fit.sigma_max_fit ? csv_number(*fit.sigma_max_fit) : "na") + "\n";
  return out;
}

std::string plane_csv(const std::vector<PlaneCell>& cells) {
  std::string out = "tau0,eta0,c2,classification\n";
  for (const auto& c : cells) {
    out += csv_number(c.tau0) + "," + csv_number(c.eta0) + "," +
           csv_number(c.c2) + "," + std::string(to_string(c.classification)) +
           "\n";
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, path.string() + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, path.string() + ": write failed");
}

void emit_report(const RobustnessReport& report, const ReportMeta& meta,
                 const fs::path& path) {
  write_text(path, report_json(report, meta));
}

void emit_sweep(const McSweepResult& result, const fs::path& path) {
  if (result.points.empty()) {
    throw Error(ErrorKind::EmptyGrid, "sweep has no points");
  }
  write_text(path, sweep_csv(result));
}

// ---- experiments -----------------------------------------------------------

namespace {

struct Context {
  const RunConfig& rc;
  std::ostream& out;
  fs::path file(const char* name) const { return rc.output / name; }
  ReportMeta meta() const { return {probe_echo_json(rc.probe), rc.seed}; }
};

std::string report_summary(const RobustnessReport& r) {
  return "classification=" + std::string(to_string(r.classification)) +
         " sigma_max=" + optional_number(r.sigma_max) +
         " f0=" + short_number(r.f0) + " c2_total=" + short_number(r.c2_total);
}

McConfig sweep_config(const RunConfig& rc, const ProbeModel& pm) {
  McConfig mc = rc.mc;
  if (mc.sigma_ratios.empty()) mc.sigma_ratios = pm.sigma_ratios;
  return mc;
}

void run_report(const Context& c) {
  const auto r = probe_report(c.rc.probe, c.rc.order);
  emit_report(r, c.meta(), c.file("report.json"));
  c.out << "report: " << report_summary(r) << "\n";
}

void run_sweep(const Context& c) {
  const auto r = probe_report(c.rc.probe, c.rc.order);
  const ProbeModel pm = make_probe_model(c.rc.probe);
  const auto result = marker_sweep(*pm.model, sweep_config(c.rc, pm));
  emit_report(r, c.meta(), c.file("report.json"));
  emit_sweep(result, c.file("sweep.csv"));
  c.out << "sweep-sigma: " << report_summary(r)
        << " slope=" << short_number(result.fit.slope)
        << " sigma_max_fit=" << optional_number(result.fit.sigma_max_fit) << "\n";
}

void run_single_qubit(const Context& c) {
  const auto& p = std::get<SingleQubitProbe>(c.rc.probe);
  const auto r = probe_report(c.rc.probe, c.rc.order);
  emit_report(r, c.meta(), c.file("report.json"));

  const double sx2 = p.disorder.sigma_x * p.disorder.sigma_x;
  const double sy2 = p.disorder.sigma_y * p.disorder.sigma_y;
  std::string csv = "beta,c2_x,c2_y,g_coefficient\n";
  SingleQubitParams q = p.params;
  for (int k = 0; k < p.beta_points; ++k) {
    q.beta = -std::numbers::pi / 2 + std::numbers::pi * k / (p.beta_points - 1);
    const double cx = c2_closed_form(q, Axis::x);
    const double cy = c2_closed_form(q, Axis::y);
    csv += csv_number(q.beta) + "," + csv_number(cx) + "," + csv_number(cy) +
           "," + csv_number(sx2 * cx + sy2 * cy) + "\n";
  }
  write_text(c.file("beta_scan.csv"), csv);

  std::string optima = "beta_x=na beta_y=na";
  try {
    const auto [bx, by] = beta_optima(p.params);
    optima = "beta_x=" + short_number(bx) + " beta_y=" + short_number(by);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularPoint) throw;
  }
  c.out << "single-qubit: " << report_summary(r)
        << " beta=" << short_number(p.params.beta) << " " << optima << "\n";
}

void run_kitaev_plane(const Context& c) {
  const auto& k = std::get<KitaevProbe>(c.rc.probe);
  const auto cells = kitaev_plane_scan(k.params.n_sites, k.params.mu, k.params.t,
                                       k.grid, c.rc.has_mc ? c.rc.mc.workers : 0);
  write_text(c.file("plane.csv"), plane_csv(cells));
  std::size_t dep = 0, dsp = 0, dip = 0;
  for (const auto& cell : cells) {
    dep += cell.classification == ProbeClass::DEP;
    dsp += cell.classification == ProbeClass::DSP;
    dip += cell.classification == ProbeClass::DIP;
  }
  c.out << "kitaev-plane: cells=" << cells.size() << " dep=" << dep
        << " dsp=" << dsp << " dip=" << dip << "\n";
}

// Equal transverse disorder makes the marker beta-independent, so beta = 0.
double transverse_marker(double h0z, double t) {
  FieldDisorder d;
  d.sigma_x = d.sigma_y = 1.0;
  SingleQubitProbe p{{h0z, t, 0.0}, false, d, 2};
  return robustness_report(active_single_qubit_spec(p), 2).c2_total;
}

void run_crossover(const Context& c) {
  const auto& s = c.rc.crossover;
  std::vector<double> grid(static_cast<std::size_t>(s.t_points));
  for (int k = 0; k < s.t_points; ++k) {
    grid[static_cast<std::size_t>(k)] =
        s.t_lo + (s.t_hi - s.t_lo) * k / (s.t_points - 1);
  }
  std::string csv = "h0z,t_plus,t_minus,tau_approx,tau_scan,c2_min,c2_max\n";
  std::size_t found = 0;
  for (double h : s.h0z) {
    const auto ct = crossover_time(h);
    const auto marker = [h](double t) { return transverse_marker(h, t); };
    double lo = marker(grid.front()), hi = lo;
    for (double t : grid) {
      const double v = marker(t);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    std::string tau = "na";
    try {
      tau = csv_number(crossover_scan(marker, grid, 1e-10));
      ++found;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSignChange) throw;
    }
    csv += csv_number(h) + "," + csv_number(ct.t_plus) + "," +
           csv_number(ct.t_minus) + "," + csv_number(ct.tau_approx) + "," + tau +
           "," + csv_number(lo) + "," + csv_number(hi) + "\n";
  }
  write_text(c.file("crossover.csv"), csv);
  c.out << "crossover: fields=" << s.h0z.size() << " sign_changes=" << found
        << "\n";
}

void run_mc_validate(const Context& c) {
  const auto r = probe_report(c.rc.probe, c.rc.order);
  const ProbeModel pm = make_probe_model(c.rc.probe);
  const McConfig mc = sweep_config(c.rc, pm);
  const auto result = marker_sweep(*pm.model, mc);
  emit_report(r, c.meta(), c.file("report.json"));
  emit_sweep(result, c.file("sweep.csv"));

  const double limit = r.sigma_max ? 0.1 * *r.sigma_max : 0.0;
  std::string csv = "sigma,g_mc,g_stderr,g_pred,z\n";
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& p : result.points) {
    const auto sigmas = mc.sigmas_at(p.sigma, pm.model->term_count());
    const double pred = predicted_marker(r, sigmas);
    const double z = p.g_stderr > 0.0 ? (p.g_mean - pred) / p.g_stderr : 0.0;
    if (!r.sigma_max || p.sigma <= limit) {
      worst = std::max(worst, std::abs(z));
      ++checked;
    }
    csv += csv_number(p.sigma) + "," + csv_number(p.g_mean) + "," +
           csv_number(p.g_stderr) + "," + csv_number(pred) + "," +
           csv_number(z) + "\n";
  }
  write_text(c.file("validate.csv"), csv);
  c.out << "mc-validate: " << report_summary(r) << " checked=" << checked
        << " max_abs_z=" << short_number(worst) << "\n";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidConfig:
    case ErrorKind::IoError:
      return kExitConfig;
    default:
      return kExitNumerical;
  }
}

}  // namespace

int run(const fs::path& config_path, const RunOverrides& overrides,
        std::ostream& out, std::ostream& err) {
  try {
    const RunConfig rc = load_run_config(config_path, overrides);
    const Context c{rc, out};
    switch (rc.experiment) {
      case Experiment::report:
        run_report(c);
        break;
      case Experiment::sweep_sigma:
        run_sweep(c);
        break;
      case Experiment::single_qubit:
        run_single_qubit(c);
        break;
      case Experiment::kitaev_plane:
        run_kitaev_plane(c);
        break;
      case Experiment::crossover:
        run_crossover(c);
        break;
      case Experiment::mc_validate:
        run_mc_validate(c);
        break;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run(const fs::path& config_path) {
  return run(config_path, {}, std::cout, std::cerr);
}

}  // namespace qfirob
