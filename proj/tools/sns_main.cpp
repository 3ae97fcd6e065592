// Command-line front end: seeded simulation runs, verification suites,
// noise statistics, operator spectra, smooth-approximation sweeps and run
// reports.  All randomness flows from the seed in the config; outputs are
// plain CSV ('.' decimal, '\n' line endings) plus SNSF field snapshots.

#include <clocale>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sns/anderson.hpp"
#include "sns/config.hpp"
#include "sns/galerkin.hpp"
#include "sns/manifest.hpp"
#include "sns/monitor.hpp"
#include "sns/noise.hpp"
#include "sns/snapshot.hpp"
#include "sns/solver.hpp"
#include "sns/verify.hpp"

namespace fs = std::filesystem;
using namespace sns;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string now_string() {
  std::time_t t = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows) {
  std::ofstream os(path, std::ios::trunc);
  os << "t,norm_w_L2,norm_wL_L2,norm_wL_H1,norm_wH,lambda,segment,N_kappa\n";
  for (const TrajectoryRow& r : rows) {
    os << fmt(r.t) << ',' << fmt(r.norm_w) << ',' << fmt(r.norm_wL) << ',' << fmt(r.norm_wL_H1)
       << ',' << fmt(r.norm_wH) << ',' << fmt(r.lambda) << ',' << r.segment << ','
       << fmt(r.n_kappa) << '\n';
  }
}

void write_energy_csv(const std::string& path, const std::vector<EnergyReport>& reports) {
  std::ofstream os(path, std::ios::trunc);
  os << "t,term1,term2,term3,term4,qform,r_term,residual,slack\n";
  for (const EnergyReport& r : reports) {
    os << fmt(r.t) << ',' << fmt(r.term1) << ',' << fmt(r.term2) << ',' << fmt(r.term3) << ','
       << fmt(r.term4) << ',' << fmt(r.qform) << ',' << fmt(r.r_term) << ',' << fmt(r.residual)
       << ',' << fmt(r.bound_slack) << '\n';
  }
}

struct CrossingRow {
  int i;
  double time;
  double lower_bound;
  double observed_gap;
};

std::vector<CrossingRow> make_crossings(const std::vector<LedgerEntry>& ledger) {
  std::vector<CrossingRow> out;
  for (std::size_t i = 1; i < ledger.size(); ++i) {
    if (ledger[i].time <= 0.0) continue;
    CrossingRow row;
    row.i = ledger[i].i;
    row.time = ledger[i].time;
    row.observed_gap = ledger[i].time - ledger[i - 1].time;
    row.lower_bound = 0.0;
    out.push_back(row);
  }
  return out;
}

double fit_interval_constant(std::vector<CrossingRow>& rows) {
  double cfit = 1.0;
  for (const CrossingRow& row : rows) {
    double lo = 1.0, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (interval_lower_bound(row.i - 1, mid) <= row.observed_gap) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    cfit = std::max(cfit, hi);
  }
  cfit *= 1.1;
  for (CrossingRow& row : rows) row.lower_bound = interval_lower_bound(row.i - 1, cfit);
  return cfit;
}

void write_crossings_csv(const std::string& path, const std::vector<CrossingRow>& rows) {
  std::ofstream os(path, std::ios::trunc);
  os << "i,T_i,lower_bound,observed_gap\n";
  for (const CrossingRow& r : rows) {
    os << r.i << ',' << fmt(r.time) << ',' << fmt(r.lower_bound) << ',' << fmt(r.observed_gap)
       << '\n';
  }
}

int cmd_simulate(const std::string& config_path) {
  SolverConfig cfg;
  KeyValueConfig kv;
  try {
    kv = KeyValueConfig::parse_file(config_path);
    cfg = load_solver_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  fs::create_directories(cfg.out_dir);

  RunManifest manifest;
  manifest.config_echo = kv.raw();
  manifest.seed = cfg.seed;
  manifest.version = code_version();
  manifest.started = now_string();

  Paracalc pc(make_grid(cfg.n), cfg.dealias);
  std::vector<EnergyReport> reports;
  std::vector<std::string> snapshot_files;

  RunResult res = run(
      cfg,
      [&](const StateSnapshot& snap) {
        reports.push_back(energy_terms(snap, pc, 0.5 * snap.kappa));
      },
      [&](double, std::uint64_t step, const VectorField& w) {
        char name[64];
        std::snprintf(name, sizeof name, "w_step%08llu.snsf",
                      static_cast<unsigned long long>(step));
        write_snapshot(cfg.out_dir + "/" + name, w);
        snapshot_files.push_back(name);
      });

  const EnergyCalibration cal = calibrate_energy_bound(reports);
  std::vector<CrossingRow> crossings = make_crossings(res.ledger);
  const double c_interval = crossings.empty() ? 0.0 : fit_interval_constant(crossings);
  const EnvelopeResult env = growth_envelope(res.rows, 0.5 * res.final_time);

  write_trajectory_csv(cfg.out_dir + "/trajectory.csv", res.rows);
  write_energy_csv(cfg.out_dir + "/energy_report.csv", reports);
  write_crossings_csv(cfg.out_dir + "/crossings.csv", crossings);

  manifest.config_echo["fitted.C"] = fmt(cal.C);
  manifest.config_echo["fitted.k"] = std::to_string(cal.k);
  manifest.config_echo["fitted.C_interval"] = fmt(c_interval);
  manifest.config_echo["fitted.c_envelope"] = fmt(env.c);
  manifest.config_echo["envelope.violations"] = std::to_string(env.violations);
  manifest.config_echo["bound.violations"] = std::to_string(cal.violations);
  manifest.config_echo["status"] =
      res.status == RunStatus::Ok
          ? "ok"
          : (res.status == RunStatus::ExplosionSuspected ? "EXPLOSION_SUSPECTED" : "NUMERIC_NAN");
  manifest.finished = now_string();

  for (const std::string& f : {std::string("trajectory.csv"), std::string("energy_report.csv"),
                               std::string("crossings.csv")})
    manifest.output_digests[f] = file_digest(cfg.out_dir + "/" + f);
  for (const std::string& f : snapshot_files)
    manifest.output_digests[f] = file_digest(cfg.out_dir + "/" + f);
  write_manifest(cfg.out_dir, manifest);

  if (res.status == RunStatus::ExplosionSuspected) {
    std::cerr << "EXPLOSION_SUSPECTED at t=" << res.final_time << " (|w| above ceiling); state dumped\n";
    return 2;
  }
  if (res.status == RunStatus::NumericNan) {
    std::cerr << "NUMERIC_NAN at t=" << res.final_time << "; state dumped\n";
    return 3;
  }
  std::cout << "completed t=" << fmt(res.final_time) << " rows=" << res.rows.size()
            << " crossings=" << crossings.size() << " out=" << cfg.out_dir << "\n";
  return 0;
}

int cmd_verify(const std::string& suite, int samples, std::uint64_t seed, int grid_n,
               const std::string& out_path) {
  VerifyOptions opts;
  opts.samples = samples;
  opts.seed = seed;
  opts.grid_n = grid_n;
  if (!out_path.empty()) opts.out_dir = fs::path(out_path).parent_path().string();
  if (opts.out_dir.empty()) opts.out_dir = ".";
  SuiteResult result;
  try {
    result = run_suite(suite, opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  write_jsonl(result, std::cout);
  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::trunc);
    write_jsonl(result, os);
  }
  if (result.underpowered > 0)
    std::cerr << "warning: " << result.underpowered
              << " statistical check(s) UNDERPOWERED at samples=" << samples << "\n";
  return result.all_pass ? 0 : 5;
}

int cmd_noise_stats(int n, double t, const std::vector<double>& lambdas, int samples,
                    std::uint64_t seed, const std::string& out_path) {
  GridPtr grid = make_grid(n);
  Paracalc pc(grid);
  std::ostringstream os;
  os << "lambda,t,r_lambda,mc_diag_mean,mc_diag_stderr,mc_offdiag_mean,samples\n";
  for (double lam : lambdas) {
    const double r = zeroth_chaos_constant(lam, t, pc.cutoff(), *grid);
    std::vector<double> diag(samples), off(samples);
    parallel_for_indexed(samples, [&](std::size_t i) {
      const VectorField x = sample_X_exact(grid, seed, t, i, pc.cutoff());
      const MatrixField e = enhanced_product(x, lam, r, pc);
      const int z = grid->index_of(0, 0);
      diag[i] = 0.5 * (e.m11[z].real() + e.m22[z].real());
      off[i] = e.m12[z].real();
    });
    double md = 0.0, mo = 0.0;
    for (int i = 0; i < samples; ++i) {
      md += diag[i] / samples;
      mo += off[i] / samples;
    }
    double vd = 0.0;
    for (int i = 0; i < samples; ++i) vd += (diag[i] - md) * (diag[i] - md) / samples;
    os << fmt(lam) << ',' << fmt(t) << ',' << fmt(r) << ',' << fmt(md) << ','
       << fmt(std::sqrt(vd / samples)) << ',' << fmt(mo) << ',' << samples << '\n';
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out_path, std::ios::trunc);
    f << os.str();
  }
  return 0;
}

int cmd_spectra(int n, double t, const std::vector<double>& lambdas, std::uint64_t seed,
                double tol, int max_iter, const std::string& out_path) {
  GridPtr grid = make_grid(n);
  Paracalc pc(grid);
  OuEnsemble ens(grid, seed);
  if (t > 0.0) ens.advance(t, std::max(1, static_cast<int>(t / 0.25)));
  const VectorField x = assemble_X(ens, pc.cutoff());
  std::ostringstream os;
  os << "lambda,seed,t,top_eig,r_lambda,iterations\n";
  for (double lam : lambdas) {
    const double r = zeroth_chaos_constant(lam, t, pc.cutoff(), *grid);
    const OperatorHandle op = make_operator(x, lam, r, pc);
    const EigenResult eig = top_eigenvalue(op, tol, max_iter);
    if (!eig.converged)
      std::cerr << "warning: lambda=" << lam << " not converged after " << eig.iterations
                << " iterations; last Rayleigh quotient reported\n";
    os << fmt(lam) << ',' << seed << ',' << fmt(t) << ',' << fmt(eig.value) << ',' << fmt(r)
       << ',' << eig.iterations << '\n';
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out_path, std::ios::trunc);
    f << os.str();
  }
  return 0;
}

int cmd_galerkin(const std::string& config_path, const std::vector<double>& levels,
                 const std::string& out_path) {
  SolverConfig cfg;
  try {
    cfg = load_solver_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  std::vector<LevelRecord> records;
  for (double lv : levels) records.push_back(run_level(cfg, lv));
  std::ostringstream os;
  os << "n,sup_norm,h1_integral,distance_to_double\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    double dist = 0.0;
    if (i + 1 < records.size() && std::abs(records[i + 1].level - 2.0 * records[i].level) < 1e-9) {
      std::vector<LevelRecord> pair = {records[i], records[i + 1], records[i + 1]};
      dist = convergence_audit(pair, 0.5, cfg.kappa).distances.front();
    }
    os << fmt(records[i].level) << ',' << fmt(std::sqrt(records[i].sup_wl_sq)) << ','
       << fmt(records[i].h1_integral) << ',' << fmt(dist) << '\n';
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    fs::create_directories(fs::path(out_path).parent_path().string().empty()
                               ? "."
                               : fs::path(out_path).parent_path().string());
    std::ofstream f(out_path, std::ios::trunc);
    f << os.str();
  }
  return 0;
}

int cmd_report(const std::string& dir) {
  RunManifest manifest;
  std::string error;
  if (!verify_manifest(dir, manifest, error)) {
    std::cerr << "report: " << error << "\n";
    return 4;
  }
  std::cout << "run " << dir << " (seed " << manifest.seed << ", version " << manifest.version
            << ")\n";
  auto echo = [&](const std::string& key, const std::string& label) {
    auto it = manifest.config_echo.find(key);
    if (it != manifest.config_echo.end()) std::cout << "  " << label << ": " << it->second << "\n";
  };
  echo("status", "status");
  echo("fitted.C", "energy bound C");
  echo("fitted.k", "energy bound k");
  echo("fitted.C_interval", "interval constant");
  echo("fitted.c_envelope", "envelope rate c");
  echo("envelope.violations", "envelope violations");
  echo("bound.violations", "bound violations");

  std::ifstream cross(dir + "/crossings.csv");
  if (cross) {
    std::cout << "crossings (i, T_i, lower_bound, observed_gap):\n";
    std::string line;
    std::getline(cross, line);  // header
    bool any = false;
    while (std::getline(cross, line)) {
      std::cout << "  " << line << "\n";
      any = true;
    }
    if (!any) std::cout << "  none\n";
  }
  std::cout << "outputs verified: " << manifest.output_digests.size() << " file(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"pseudo-spectral simulation lab for the stochastically forced 2D torus flow"};
  app.require_subcommand(1);

  std::string config_path;
  auto* sim = app.add_subcommand("simulate", "run a seeded trajectory from a config file");
  sim->add_option("--config", config_path, "flat key=value config file")->required();

  std::string suite;
  int samples = 1000;
  std::uint64_t seed = 1;
  int grid_n = 64;
  std::string out_path;
  auto* ver = app.add_subcommand("verify", "run a module invariant suite (JSON-lines report)");
  ver->add_option("suite", suite, "paracalc | noise | operator | energy | galerkin")->required();
  ver->add_option("--samples", samples, "Monte-Carlo sample count");
  ver->add_option("--seed", seed, "base seed");
  ver->add_option("--n", grid_n, "grid modes per axis");
  ver->add_option("--out", out_path, "also write the JSON-lines report here");

  double t_stat = 1.0;
  std::vector<double> lambdas = {8.0, 27.0};
  auto* ns = app.add_subcommand("noise-stats", "Monte-Carlo statistics of the enhanced product");
  ns->add_option("--n", grid_n, "grid modes per axis");
  ns->add_option("--t", t_stat, "time slice");
  ns->add_option("--lambdas", lambdas, "cutoff levels");
  ns->add_option("--samples", samples, "sample count");
  ns->add_option("--seed", seed, "seed");
  ns->add_option("--out", out_path, "output CSV (stdout if omitted)");

  double tol = 1e-7;
  int max_iter = 60000;
  auto* sp = app.add_subcommand("spectra", "top eigenvalue of the renormalised operator");
  sp->add_option("--n", grid_n, "grid modes per axis");
  sp->add_option("--t", t_stat, "time of the driving field sample");
  sp->add_option("--lambdas", lambdas, "cutoff levels");
  sp->add_option("--seed", seed, "seed");
  sp->add_option("--tol", tol, "Rayleigh-quotient tolerance");
  sp->add_option("--max-iter", max_iter, "iteration cap");
  sp->add_option("--out", out_path, "output CSV (stdout if omitted)");

  std::vector<double> levels = {8.0, 16.0, 32.0, 64.0};
  auto* gal = app.add_subcommand("galerkin", "coupled smooth-approximation level sweep");
  gal->add_option("--config", config_path, "base config file")->required();
  gal->add_option("--levels", levels, "mollification levels");
  gal->add_option("--out", out_path, "levels.csv path (stdout if omitted)");

  std::string run_dir;
  auto* rep = app.add_subcommand("report", "summarise a finished run directory");
  rep->add_option("dir", run_dir, "run output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path);
    if (ver->parsed()) return cmd_verify(suite, samples, seed, grid_n, out_path);
    if (ns->parsed()) return cmd_noise_stats(grid_n, t_stat, lambdas, samples, seed, out_path);
    if (sp->parsed()) return cmd_spectra(grid_n, t_stat, lambdas, seed, tol, max_iter, out_path);
    if (gal->parsed()) return cmd_galerkin(config_path, levels, out_path);
    if (rep->parsed()) return cmd_report(run_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
