// Drives the installed-style qfirob executable through the shell, checking
// exit codes, stdout/stderr contracts and the artifacts it leaves behind.

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "scratch_dir.hpp"

namespace {

using qfirob::testing_support::ScratchDir;
using qfirob::testing_support::slurp;

struct Result {
  int code = -1;
  std::string out, err;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

Result qfirob_cli(const ScratchDir& dir, const std::string& args, const std::string& env = "") {
  const char* exe = std::getenv("QFIROB_CLI_PATH");
  if (!exe) throw std::runtime_error("QFIROB_CLI_PATH is not set");
  const std::string cmd = env + " " + quote(exe) + " " + args + " >" +
                          quote((dir / "stdout.txt").string()) + " 2>" +
                          quote((dir / "stderr.txt").string());
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

TEST(Cli, VersionAndUsage) {
  ScratchDir dir("cli");
  auto r = qfirob_cli(dir, "--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(r.out.empty());
  EXPECT_EQ(qfirob_cli(dir, "").code, 2);
  EXPECT_EQ(qfirob_cli(dir, "report").code, 2);
  EXPECT_EQ(qfirob_cli(dir, "report --config " + quote((dir / "missing.ini").string())).code, 2);
  EXPECT_EQ(qfirob_cli(dir, "frobnicate --config x").code, 2);
}

TEST(Cli, ReportSucceedsAndPrintsSummary) {
  ScratchDir dir("cli");
  const auto cfg = dir.write("sq.ini",
                             "[run]\nexperiment = report\n[single_qubit]\nh0z = 4\nt = 1\n"
                             "sigma_x = 1\nsigma_y = 1\n");
  const auto r = qfirob_cli(dir, "report --config " + quote(cfg.string()) + " --seed 5 --out " +
                                     quote((dir / "o").string()));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("classification=DSP sigma_max=2.42676"), std::string::npos) << r.out;
  EXPECT_NE(slurp(dir / "o" / "report.json").find("\"seed\": 5"), std::string::npos);
}

TEST(Cli, ConfigErrorExitsTwo) {
  ScratchDir dir("cli");
  const auto cfg = dir.write("bad.ini",
                             "[run]\nexperiment = sweep-sigma\n[single_qubit]\nh0z = 4\n"
                             "sigma_x = 1\n[mc]\nn_realizations = 200\nsigma_grid = 0.3, 0.1\n");
  const auto r = qfirob_cli(dir, "sweep-sigma --config " + quote(cfg.string()) + " --out " +
                                     quote((dir / "o").string()));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.ini:8: [mc] sigma_grid"), std::string::npos) << r.err;
}

TEST(Cli, NumericalFailureExitsThree) {
  ScratchDir dir("cli");
  dir.write("h.mat", "2\n1,0 0,0\n0,0 -1,0\n");
  dir.write("x.mat", "2\n0,0 1,0\n1,0 0,0\n");
  dir.write("up.vec", "2\n1,0\n0,0\n");
  const auto cfg = dir.write("eig.ini",
                             "[matrix]\nh_theta = h.mat\ndtheta_h = h.mat\nstate = up.vec\n"
                             "terms = hx\n[term.hx]\nop = x.mat\nsigma = 0.1\n");
  const auto r = qfirob_cli(dir, "report --config " + quote(cfg.string()) + " --out " +
                                     quote((dir / "o").string()));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("ZeroCleanQfi"), std::string::npos) << r.err;
}

TEST(Cli, SweepIsByteIdenticalAcrossThreadCounts) {
  ScratchDir dir("cli");
  const auto cfg = dir.write("sw.ini",
                             "[run]\nseed = 31\n[single_qubit]\nh0z = 4\nsigma_x = 1\nsigma_y = 1\n"
                             "[mc]\nn_realizations = 3000\nsigma_grid = 0.05, 0.1, 0.2, 0.4\n");
  std::string first;
  for (const char* threads : {"1", "2", "8"}) {
    const auto out = dir / (std::string("o") + threads);
    const auto r = qfirob_cli(dir, "sweep-sigma --config " + quote(cfg.string()) + " --out " +
                                       quote(out.string()),
                              std::string("QFIROB_THREADS=") + threads);
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(out / "sweep.csv");
    if (first.empty()) first = csv;
    EXPECT_EQ(csv, first) << threads;
  }
}

TEST(Cli, KitaevPlaneHasBothSigns) {
  ScratchDir dir("cli");
  const auto cfg = dir.write("kp.ini",
                             "[kitaev]\nn_sites = 5\nmu = 2\nt = 1\ntau0 = 1\neta0 = 1\n"
                             "tau_lo = 1\ntau_hi = 6\neta_lo = 1\neta_hi = 6\n"
                             "tau_points = 40\neta_points = 40\n");
  const auto r = qfirob_cli(dir, "kitaev-plane --config " + quote(cfg.string()) + " --out " +
                                     quote((dir / "o").string()));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "o" / "plane.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  int rows = 0, positive = 0, negative = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto a = line.find(',', line.find(',') + 1);
    const double c2 = std::stod(line.substr(a + 1, line.rfind(',') - a - 1));
    positive += c2 > 0;
    negative += c2 < 0;
  }
  EXPECT_EQ(rows, 1600);
  EXPECT_GT(positive, 0);
  EXPECT_GT(negative, 0);
  EXPECT_NE(r.out.find("cells=1600"), std::string::npos);
}

}  // namespace
