#include <cmath>

#include "doctest.h"
#include "sns/monitor.hpp"
#include "sns/verify.hpp"

using namespace sns;

TEST_CASE("interval lower bound: pinned values and clamping") {
  // i = 1, C = 1: log((1+2-1)/(1+1)) = log(1) = 0
  CHECK(interval_lower_bound(1, 1.0) == 0.0);
  // C -> 0+: log(3)/(1 + log 2)
  const double want = std::log(3.0) / (1.0 + std::log(2.0));
  CHECK(std::abs(interval_lower_bound(1, 1e-12) - want) <= 1e-9);
  // numerator clamp: i^2 + 2i - C <= 0
  CHECK(interval_lower_bound(1, 3.0) == 0.0);
  CHECK(interval_lower_bound(0, 2.0) == 0.0);
  CHECK(interval_lower_bound(5, -1.0) == 0.0);
  // decreasing in C past the clamp region
  CHECK(interval_lower_bound(10, 1.0) > interval_lower_bound(10, 4.0));
}

TEST_CASE("interval lower bound: partial sums keep growing") {
  double to_1e4 = 0.0, to_1e6 = 0.0;
  for (int i = 1; i <= 1000000; ++i) {
    const double b = interval_lower_bound(i, 2.0);
    if (i <= 10000) to_1e4 += b;
    to_1e6 += b;
  }
  CHECK(to_1e6 > to_1e4 + 0.3);  // far from summable: the tail keeps adding mass
  CHECK(to_1e4 > 0.5);
}

TEST_CASE("growth envelope: constant trajectories and monotonicity in c") {
  std::vector<TrajectoryRow> rows;
  for (int i = 0; i <= 100; ++i) {
    TrajectoryRow r;
    r.t = i * 0.01;
    r.norm_w = 2.0;
    rows.push_back(r);
  }
  const EnvelopeResult env = growth_envelope(rows, 0.5);
  CHECK(env.violations == 0);
  CHECK_FALSE(env.degenerate);
  // envelope value grows with c, so violation counts cannot increase
  int prev = 1 << 20;
  for (double c : {-1.0, 0.0, 0.5, 1.0}) {
    int cnt = 0;
    for (const TrajectoryRow& r : rows)
      if (r.t > 0.5 && r.norm_w > std::exp(std::exp(c * r.t)) + 1e-9) ++cnt;
    CHECK(cnt <= prev);
    prev = cnt;
  }

  std::vector<TrajectoryRow> tiny(1);
  CHECK(growth_envelope(tiny, 0.5).degenerate);
}

TEST_CASE("fractional energy: L2 limit and monotonicity in the exponent") {
  GridPtr g = make_grid(32);
  const VectorField w = random_field(g, 21, 0, 1.0, true);
  const double l2 = l2_norm(w);
  CHECK(std::abs(fractional_energy(w, 0.0) - l2 * l2) <= 1e-12 * l2 * l2);
  // all retained modes have |k| >= 1, so the energy grows with eps
  double prev = 0.0;
  for (double eps : {0.0, 0.02, 0.05, 0.09}) {
    const double e = fractional_energy(w, eps);
    CHECK(e >= prev);
    prev = e;
  }
  CHECK_THROWS_AS(fractional_energy(w, -0.1), std::invalid_argument);
}

TEST_CASE("high-low norm: zero field and trivial control") {
  GridPtr g = make_grid(32);
  Paracalc pc(g);
  VectorField zero(g), q(g);
  CHECK(hl_norm(zero, q, 8.0, 0.1, pc).value == 0.0);
  const VectorField w = random_field(g, 22, 0, 1.5, true);
  const HlNormValue v = hl_norm(w, q, 8.0, 0.1, pc);
  CHECK(v.high_c4 == 0.0);
  CHECK(std::abs(v.value - sobolev_norm(w, 1.0)) <= 1e-12 * v.value);
  CHECK(v.value > 0.0);
}

TEST_CASE("energy decomposition closes along a short audited run") {
  SolverConfig cfg;
  cfg.n = 32;
  cfg.seed = 11;
  cfg.dt = 5e-4;
  cfg.t_end = 0.12;
  cfg.cadence = 10;
  cfg.u0.norm = 0.5;
  Paracalc pc(make_grid(cfg.n), cfg.dealias);
  std::vector<EnergyReport> reports;
  const RunResult res = run(cfg, [&](const StateSnapshot& snap) {
    reports.push_back(energy_terms(snap, pc, 0.5 * snap.kappa));
  });
  CHECK(res.status == RunStatus::Ok);
  REQUIRE(reports.size() > 5);
  for (const EnergyReport& rep : reports) {
    CHECK(rep.lap_split_residual <= 1e-9);
    // operator line through the quadratic form, exact identity
    const double recon = -1.5 * rep.norm_wL_H1 * rep.norm_wL_H1 + rep.qform + rep.r_term;
    CHECK(std::abs(rep.term1 - recon) <=
          1e-9 * std::max({std::abs(rep.term1), std::abs(recon), 1.0}));
    const double total = std::abs(rep.term1) + std::abs(rep.term2) + std::abs(rep.term3) +
                         std::abs(rep.term4);
    CHECK(std::abs(rep.residual) <= 0.2 * total);  // coarse grid, loose cap
    CHECK(std::isfinite(rep.frac_energy));
    CHECK(rep.n_kappa >= 1.0);
  }
}

TEST_CASE("bound calibration validates on synthetic reports") {
  std::vector<EnergyReport> reports;
  for (int i = 0; i < 40; ++i) {
    EnergyReport rep;
    rep.t = 0.01 * i;
    rep.lambda = 8.0;
    rep.n_kappa = 2.0;
    rep.norm_wL = 1.0;
    rep.norm_wL_H1 = 2.0;
    rep.norm_wL_Hs = 1.5;
    rep.qform = -1.0;
    rep.r_term = 0.5;
    // fd sits above the base line by a fixed multiple of the extra term
    const double base = -1.5 * rep.norm_wL_H1 * rep.norm_wL_H1 + rep.qform + rep.r_term;
    const double extra = std::pow(8.0, 1.0 / 3.0) * 2.0 * 1.5 + 2.0 * (1.5 + 2.25);
    rep.fd_derivative = base + 0.37 * extra;
    reports.push_back(rep);
  }
  const EnergyCalibration cal = calibrate_energy_bound(reports);
  CHECK(cal.k == 1);
  CHECK(cal.violations == 0);
  CHECK(cal.C == doctest::Approx(0.37 * 1.1).epsilon(1e-9));
  for (const EnergyReport& rep : reports) CHECK(rep.bound_slack >= 0.0);
}

TEST_CASE("linear trend fit flags real slopes and accepts flat series") {
  std::vector<double> t, flat, rising;
  for (int i = 0; i < 50; ++i) {
    t.push_back(i * 0.1);
    flat.push_back(3.0 + 0.001 * ((i * 2654435761u >> 3) % 97 / 97.0 - 0.5));
    rising.push_back(1.0 + 0.5 * i * 0.1);
  }
  CHECK(std::abs(linear_trend(t, flat).slope) <= 0.01);
  const TrendFit rf = linear_trend(t, rising);
  CHECK(rf.slope == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rf.t_stat > 10.0);
}
