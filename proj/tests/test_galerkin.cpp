#include <cmath>

#include "doctest.h"
#include "sns/galerkin.hpp"
#include "sns/verify.hpp"

using namespace sns;

namespace {

SolverConfig level_config(int n, double t_end) {
  SolverConfig cfg;
  cfg.n = n;
  cfg.seed = 301;
  cfg.dt = 1e-3;
  cfg.t_end = t_end;
  cfg.cadence = 10;
  cfg.u0.norm = 0.5;
  cfg.store_fields = true;
  return cfg;
}

}  // namespace

TEST_CASE("a level beyond twice the grid radius reproduces the primary run") {
  SolverConfig cfg = level_config(32, 0.08);
  const RunResult primary = run(cfg);
  const double big = 2.0 * make_grid(32)->radius() + 2.0;
  const LevelRecord lv = run_level(cfg, big);
  REQUIRE(primary.stored_fields.size() == lv.result.stored_fields.size());
  for (std::size_t i = 0; i < primary.stored_fields.size(); ++i) {
    const VectorField diff = primary.stored_fields[i].second - lv.result.stored_fields[i].second;
    CHECK(max_abs_coeff(diff) == 0.0);
  }
  REQUIRE(primary.rows.size() == lv.result.rows.size());
  for (std::size_t i = 0; i < primary.rows.size(); ++i) {
    CHECK(primary.rows[i].norm_w == lv.result.rows[i].norm_w);
    CHECK(primary.rows[i].norm_wH == lv.result.rows[i].norm_wH);
    CHECK(primary.rows[i].n_kappa == lv.result.rows[i].n_kappa);
  }
}

TEST_CASE("level one strictly contracts the driving field") {
  GridPtr g = make_grid(32);
  Paracalc pc(g);
  OuEnsemble ens(g, 301);
  ens.advance(0.5, 2);
  const VectorField full = assemble_X(ens, pc.cutoff());
  const VectorField cut = assemble_X(ens, pc.cutoff(), 1.0);
  CHECK(l2_norm(cut) < l2_norm(full));
}

TEST_CASE("coupled levels converge monotonically with stable derivatives") {
  SolverConfig cfg = level_config(32, 0.3);
  std::vector<LevelRecord> levels;
  for (double lv : {4.0, 8.0, 16.0, 32.0}) levels.push_back(run_level(cfg, lv));
  const ConvergenceAudit audit = convergence_audit(levels, 0.5, cfg.kappa);
  REQUIRE(audit.distances.size() == 3);
  CHECK(audit.distances[0] > audit.distances[1]);
  CHECK(audit.distances[1] > audit.distances[2]);
  CHECK(audit.distances_decreasing);
  double lo = 1e300, hi = 0.0;
  for (double v : audit.dt_surrogates) {
    CHECK(std::isfinite(v));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi <= 2.0 * lo);
  for (const LevelRecord& lv : levels) {
    CHECK(std::isfinite(lv.sup_wl_sq));
    CHECK(std::isfinite(lv.h1_integral));
  }
  // identical level lists give zero distance
  std::vector<LevelRecord> twice = {levels[3], levels[3], levels[3]};
  const ConvergenceAudit same = convergence_audit(twice, 0.5, cfg.kappa);
  CHECK(same.distances[0] == 0.0);
}

TEST_CASE("convergence audit needs at least three levels") {
  SolverConfig cfg = level_config(16, 0.02);
  std::vector<LevelRecord> levels = {run_level(cfg, 4.0), run_level(cfg, 8.0)};
  CHECK_THROWS_AS(convergence_audit(levels, 0.5, cfg.kappa), std::invalid_argument);
  CHECK_THROWS_AS(run_level(cfg, 0.5), std::invalid_argument);
}
