#pragma once

// Experiment orchestration behind the qfirob command line: typed run
// configuration, output artifacts, and exit-code policy.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "qfirob/expansion.hpp"
#include "qfirob/kitaev.hpp"
#include "qfirob/monte_carlo.hpp"
#include "qfirob/single_qubit.hpp"

namespace qfirob {

enum class Experiment {
  report,
  sweep_sigma,
  single_qubit,
  kitaev_plane,
  crossover,
  mc_validate,
};

std::string_view to_string(Experiment e);
std::optional<Experiment> experiment_from_string(std::string_view name);

struct SingleQubitProbe {
  SingleQubitParams params;
  bool optimal_beta = false;  // beta chosen by select_beta (0 when sigma_x == sigma_y)
  FieldDisorder disorder;
  int beta_points = 181;
};

struct KitaevProbe {
  KitaevParams params;
  PlaneGrid grid;
};

struct MatrixProbe {
  DisorderedProbeSpec spec;
  std::vector<std::string> files;  // as written in the config, for the echo
};

using Probe = std::variant<SingleQubitProbe, KitaevProbe, MatrixProbe>;

struct CrossoverSettings {
  std::vector<double> h0z;
  double t_lo = 0.05;
  double t_hi = 3.0;
  int t_points = 60;
};

struct RunConfig {
  Experiment experiment = Experiment::report;
  Probe probe;
  bool has_mc = false;
  McConfig mc;
  CrossoverSettings crossover;
  int order = 2;
  std::filesystem::path output = ".";
  std::uint64_t seed = 0;
};

// Command-line values; each replaces the matching [run] key.
struct RunOverrides {
  std::optional<Experiment> experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
};

// Parses and validates; ConfigError (line-anchored) or InvalidConfig on bad
// input. Relative matrix paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path,
                          const RunOverrides& overrides = {});

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Runs the configured experiment, writes its artifacts into the output
// directory and prints a one-line summary to `out`. Errors go to `err` as
// "error: <ErrorName>: detail".
int run(const std::filesystem::path& config_path,
        const RunOverrides& overrides, std::ostream& out, std::ostream& err);
int run(const std::filesystem::path& config_path);

// Metadata recorded next to every report.
struct ReportMeta {
  std::string probe_echo_json = "{}";  // JSON object text
  std::uint64_t seed = 0;
};

std::string tool_version();

// JSON rendering with doubles in shortest round-trip form.
std::string report_json(const RobustnessReport& report, const ReportMeta& meta);
std::string sweep_csv(const McSweepResult& result);
std::string plane_csv(const std::vector<PlaneCell>& cells);

// IoError when the file cannot be written.
void emit_report(const RobustnessReport& report, const ReportMeta& meta,
                 const std::filesystem::path& path);
void emit_sweep(const McSweepResult& result, const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// "%.12g".
std::string csv_number(double v);

std::string probe_echo_json(const Probe& probe);

// Exact per-realization QFI model of a configured probe, with the per-term
// sigma ratios implied by the probe section.
struct ProbeModel {
  std::unique_ptr<QfiModel> model;
  std::vector<double> sigma_ratios;
};
ProbeModel make_probe_model(const Probe& probe);
RobustnessReport probe_report(const Probe& probe, int order);

}  // namespace qfirob
