#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sns/config.hpp"
#include "sns/manifest.hpp"
#include "sns/solver.hpp"

using namespace sns;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = std::string(SNS_CLI_PATH) + " " + args + " >" + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

void write_config(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::trunc);
  os << body;
}

struct TempDir {
  fs::path dir;
  explicit TempDir(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

}  // namespace

TEST_CASE("config parsing: defaults, unknown keys, line-precise errors") {
  TempDir td("sns_cli_cfg");
  write_config(td / "ok.conf", "n = 16\nseed = 3\n");
  const SolverConfig cfg = load_solver_config(td / "ok.conf");
  CHECK(cfg.dt == 5e-4);
  CHECK(cfg.t_end == 2.0);
  CHECK(cfg.kappa == 0.1);
  CHECK(cfg.a == 3.0);
  CHECK(cfg.zeta.mode == ZetaSpec::Mode::Spectral);
  CHECK(cfg.ceiling == 1e6);

  write_config(td / "bad.conf", "n = 16\nseed = 3\nwibble = 2\n");
  try {
    load_solver_config(td / "bad.conf");
    FAIL("expected rejection of unknown key");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":3:") != std::string::npos);
    CHECK(msg.find("wibble") != std::string::npos);
  }

  write_config(td / "bad2.conf", "n = 16\nseed = 3\ndt = -1\n");
  CHECK_THROWS_AS(load_solver_config(td / "bad2.conf"), ConfigError);
  write_config(td / "bad3.conf", "seed = 3\n");
  CHECK_THROWS_AS(load_solver_config(td / "bad3.conf"), ConfigError);
  CHECK_THROWS_AS(load_solver_config(td / "missing.conf"), ConfigError);
}

TEST_CASE("simulate: artifacts, exit codes, determinism") {
  TempDir td("sns_cli_sim");
  const std::string out1 = td / "run1";
  const std::string out2 = td / "run2";
  const std::string conf = td / "sim.conf";
  write_config(conf, "n = 16\nseed = 5\ndt = 1e-3\nt_end = 0.05\nout_dir = " + out1 + "\n");
  CHECK(run_cli("simulate --config " + conf, td / "log1") == 0);
  CHECK(fs::exists(out1 + "/trajectory.csv"));
  CHECK(fs::exists(out1 + "/energy_report.csv"));
  CHECK(fs::exists(out1 + "/crossings.csv"));
  CHECK(fs::exists(out1 + "/manifest.json"));
  CHECK(fs::exists(out1 + "/w_step00000050.snsf"));

  write_config(conf, "n = 16\nseed = 5\ndt = 1e-3\nt_end = 0.05\nout_dir = " + out2 + "\n");
  CHECK(run_cli("simulate --config " + conf, td / "log2") == 0);
  CHECK(file_digest(out1 + "/trajectory.csv") == file_digest(out2 + "/trajectory.csv"));
  CHECK(file_digest(out1 + "/energy_report.csv") == file_digest(out2 + "/energy_report.csv"));
  CHECK(file_digest(out1 + "/w_step00000050.snsf") == file_digest(out2 + "/w_step00000050.snsf"));

  // missing config names the path and exits 1
  CHECK(run_cli("simulate --config " + (td / "nope.conf"), td / "log3") == 1);
  CHECK(slurp(td / "log3").find("nope.conf") != std::string::npos);

  // t_end = 0 leaves the header and initial row only
  const std::string out3 = td / "run3";
  write_config(conf, "n = 16\nseed = 5\nt_end = 0\nout_dir = " + out3 + "\n");
  CHECK(run_cli("simulate --config " + conf, td / "log4") == 0);
  std::ifstream is(out3 + "/trajectory.csv");
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 2);

  // ceiling below the initial norm trips the blow-up guard, exit 2
  const std::string out4 = td / "run4";
  write_config(conf,
               "n = 16\nseed = 5\ndt = 1e-3\nt_end = 0.05\nceiling = 0.2\nout_dir = " + out4 +
                   "\n");
  CHECK(run_cli("simulate --config " + conf, td / "log5") == 2);
  CHECK(slurp(td / "log5").find("EXPLOSION_SUSPECTED") != std::string::npos);
}

TEST_CASE("report: round trip, corrupt digests, empty directory") {
  TempDir td("sns_cli_rep");
  const std::string out = td / "run";
  const std::string conf = td / "sim.conf";
  write_config(conf, "n = 16\nseed = 9\ndt = 1e-3\nt_end = 0.02\nout_dir = " + out + "\n");
  REQUIRE(run_cli("simulate --config " + conf, td / "log") == 0);
  CHECK(run_cli("report " + out, td / "rep1") == 0);
  const std::string first = slurp(td / "rep1");
  CHECK(first.find("seed 9") != std::string::npos);
  CHECK(run_cli("report " + out, td / "rep2") == 0);
  CHECK(first == slurp(td / "rep2"));  // report is a pure function of the files

  {
    std::ofstream os(out + "/trajectory.csv", std::ios::app);
    os << "tampered\n";
  }
  CHECK(run_cli("report " + out, td / "rep3") == 4);

  const std::string empty = td / "empty";
  fs::create_directories(empty);
  CHECK(run_cli("report " + empty, td / "rep4") == 4);
}

TEST_CASE("verify: unknown suite and underpowered statistics") {
  TempDir td("sns_cli_ver");
  CHECK(run_cli("verify nosuch", td / "v1") == 1);
  // a tiny sample count downgrades statistical checks to warnings, exit 0
  CHECK(run_cli("verify noise --samples 10 --n 16", td / "v2") == 0);
  const std::string out = slurp(td / "v2");
  CHECK(out.find("UNDERPOWERED") != std::string::npos);
}

TEST_CASE("noise-stats is independent of the worker count") {
  TempDir td("sns_cli_ns");
  const std::string csv1 = td / "a.csv";
  const std::string csv2 = td / "b.csv";
  const std::string base = "noise-stats --n 16 --t 0.5 --lambdas 4 --samples 64 --seed 2 --out ";
  const std::string cmd1 = "SNS_THREADS=1 " + std::string(SNS_CLI_PATH) + " " + base + csv1 +
                           " >" + (td / "l1") + " 2>&1";
  const std::string cmd2 = "SNS_THREADS=4 " + std::string(SNS_CLI_PATH) + " " + base + csv2 +
                           " >" + (td / "l2") + " 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd1.c_str())) == 0);
  REQUIRE(WEXITSTATUS(std::system(cmd2.c_str())) == 0);
  CHECK(slurp(csv1) == slurp(csv2));
  CHECK(slurp(csv1).find("lambda,t,r_lambda") == 0);
}

TEST_CASE("spectra emits one row per level") {
  TempDir td("sns_cli_sp");
  const std::string csv = td / "spec.csv";
  CHECK(run_cli("spectra --n 16 --t 0.5 --lambdas 2 8 --seed 3 --tol 1e-5 --out " + csv,
                td / "log") == 0);
  std::ifstream is(csv);
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 3);
}

TEST_CASE("galerkin subcommand writes the level table") {
  TempDir td("sns_cli_gal");
  const std::string conf = td / "g.conf";
  const std::string csv = td / "levels.csv";
  write_config(conf, "n = 16\nseed = 4\ndt = 2e-3\nt_end = 0.05\n");
  CHECK(run_cli("galerkin --config " + conf + " --levels 4 8 16 --out " + csv, td / "log") == 0);
  std::ifstream is(csv);
  std::string header;
  std::getline(is, header);
  CHECK(header == "n,sup_norm,h1_integral,distance_to_double");
  int lines = 0;
  std::string line;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 3);
}
