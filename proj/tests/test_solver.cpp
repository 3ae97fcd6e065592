#include <cmath>

#include "doctest.h"
#include "sns/solver.hpp"
#include "sns/verify.hpp"

using namespace sns;

namespace {

SolverConfig base_config(int n, double dt, double t_end) {
  SolverConfig cfg;
  cfg.n = n;
  cfg.seed = 7;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.cadence = 10;
  return cfg;
}

void run_to_end(Simulator& sim, double t_end) {
  while (sim.t() < t_end - 1e-12 && sim.status() == RunStatus::Ok) sim.step();
}

// Classical fourth-order stages for the frozen-coefficient reference.
VectorField rhs_linearised(const VectorField& y, const VectorField& x, bool dealias) {
  MatrixField m = 2.0 * symmetric_tensor_product(x, y, dealias);
  m = m + symmetric_tensor_product(x, x, dealias);
  return laplacian(y) + leray_project(divergence(m));
}

}  // namespace

TEST_CASE("threshold rule: initial levels and jumps") {
  // |u0| = 0.5: floor index 0, initial level (1 + ceil(0.5))^3 = 8
  {
    SolverConfig cfg = base_config(16, 1e-3, 0.0);
    cfg.u0.mode = U0Spec::Mode::Random;
    cfg.u0.norm = 0.5;
    Simulator sim(cfg);
    CHECK(sim.segment() == 0);
    CHECK(sim.lambda() == doctest::Approx(8.0));
    CHECK(sim.ledger().size() == 1);
    CHECK(sim.ledger()[0].i == 0);
    CHECK(sim.ledger()[0].time == 0.0);
  }
  // |u0| = 2.7: indices 0,1,2 start at time zero
  {
    SolverConfig cfg = base_config(16, 1e-3, 0.0);
    cfg.u0.norm = 2.7;
    Simulator sim(cfg);
    CHECK(sim.segment() == 2);
    CHECK(sim.lambda() == doctest::Approx(64.0));  // (1 + ceil(2.7))^3
    REQUIRE(sim.ledger().size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(sim.ledger()[i].i == i);
      CHECK(sim.ledger()[i].time == 0.0);
    }
  }
  // synthetic crossing: from segment 1, the norm reaches 2 at t = 0.4
  {
    int segment = 1;
    double lambda = 8.0;
    std::vector<LedgerEntry> ledger = {{0, 0.0}, {1, 0.0}};
    apply_threshold_rule(2.0, 0.4, 3.0, segment, lambda, ledger);
    CHECK(segment == 2);
    CHECK(lambda == doctest::Approx(27.0));
    REQUIRE(ledger.size() == 3);
    CHECK(ledger.back().i == 2);
    CHECK(ledger.back().time == 0.4);
    // a jump across two thresholds books both at the same time
    apply_threshold_rule(4.5, 0.9, 3.0, segment, lambda, ledger);
    CHECK(segment == 4);
    CHECK(lambda == doctest::Approx(125.0));
    CHECK(ledger[3].time == 0.9);
    CHECK(ledger[4].time == 0.9);
  }
}

TEST_CASE("zero noise shear mode decays exactly") {
  SolverConfig cfg = base_config(16, 1e-3, 1.0);
  cfg.noise_on = false;
  cfg.zeta.mode = ZetaSpec::Mode::Off;
  cfg.u0.mode = U0Spec::Mode::Shear;
  cfg.u0.amplitude = 1.0;
  Simulator sim(cfg);
  run_to_end(sim, 1.0);
  CHECK(sim.status() == RunStatus::Ok);
  VectorField want(make_grid(16));
  want.at1(0, 1) = cplx(0.0, -0.5) * std::exp(-1.0);
  want.at1(0, -1) = std::conj(want.at1(0, 1));
  CHECK(l2_norm(sim.w() - want) <= 1e-8);
  CHECK(l2_norm(sim.y()) == 0.0);
  CHECK(l2_norm(sim.q()) == 0.0);
}

TEST_CASE("zero forcing energy law holds to one percent") {
  SolverConfig cfg = base_config(32, 1e-4, 1.0);
  cfg.noise_on = false;
  cfg.zeta.mode = ZetaSpec::Mode::Off;
  cfg.u0.mode = U0Spec::Mode::Random;
  cfg.u0.norm = 1.0;
  cfg.u0.decay = 2.0;
  Simulator sim(cfg);
  for (int burn = 0; burn < 5; ++burn) sim.step();
  const double e0 = l2_norm(sim.w()) * l2_norm(sim.w());
  const double g0 = sobolev_norm(sim.w(), 1.0);
  sim.step();
  const double g1 = sobolev_norm(sim.w(), 1.0);
  const double e1 = l2_norm(sim.w()) * l2_norm(sim.w());
  const double fd = (e1 - e0) / cfg.dt;
  const double want = -2.0 * 0.5 * (g0 * g0 + g1 * g1);
  CHECK(std::abs(fd - want) <= 0.01 * std::abs(want));
}

TEST_CASE("frozen-coefficient linear equation matches a fine reference") {
  // X pinned to one deterministic mode, no perturbation: the companion field
  // solves a linear spectral ODE; compare against RK4 at dt/100.
  const int n = 16;
  SolverConfig cfg = base_config(n, 5e-3, 0.5);
  cfg.noise_on = false;
  cfg.zeta.mode = ZetaSpec::Mode::Off;
  cfg.u0.mode = U0Spec::Mode::Zero;
  GridPtr g = make_grid(n);
  VectorField x(g);
  x.at1(0, 1) = cplx(0.4, 0.0);  // along k-perp of (0,1)
  x.at1(0, -1) = cplx(0.4, 0.0);
  x.divergence_free = true;

  Simulator sim(cfg);
  sim.freeze_x(x);
  run_to_end(sim, cfg.t_end);

  const double h = cfg.dt / 100.0;
  VectorField y(g);
  const int steps = static_cast<int>(std::llround(cfg.t_end / h));
  for (int s = 0; s < steps; ++s) {
    const VectorField k1 = rhs_linearised(y, x, cfg.dealias);
    VectorField tmp = y;
    axpy(0.5 * h, k1, tmp);
    const VectorField k2 = rhs_linearised(tmp, x, cfg.dealias);
    tmp = y;
    axpy(0.5 * h, k2, tmp);
    const VectorField k3 = rhs_linearised(tmp, x, cfg.dealias);
    tmp = y;
    axpy(h, k3, tmp);
    const VectorField k4 = rhs_linearised(tmp, x, cfg.dealias);
    axpy(h / 6.0, k1, y);
    axpy(h / 3.0, k2, y);
    axpy(h / 3.0, k3, y);
    axpy(h / 6.0, k4, y);
  }
  CHECK(l2_norm(sim.y() - y) <= 1e-4 * l2_norm(y));
  CHECK(l2_norm(y) > 0.0);
}

TEST_CASE("heat companion: stationary second moment at one mode") {
  // E |Q_hat(k)|^2 at t: 4 * int_0^t u^2 e^{-2|k|^2 u} du, here |k| = 1, t = 2.
  GridPtr g = make_grid(4);
  const int paths = 600;
  const int idx = g->index_of(0, 1);
  SolverConfig cfg = base_config(4, 0.1, 2.0);
  cfg.cadence = 1000;
  double mean = 0.0, var = 0.0;
  std::vector<double> vals(paths);
  for (int p = 0; p < paths; ++p) {
    cfg.seed = 50000 + p;
    cfg.u0.mode = U0Spec::Mode::Zero;
    cfg.zeta.mode = ZetaSpec::Mode::Off;
    Simulator sim(cfg);
    run_to_end(sim, 2.0);
    vals[p] = std::norm(sim.q().c1[idx]) + std::norm(sim.q().c2[idx]);
    mean += vals[p] / paths;
  }
  for (int p = 0; p < paths; ++p) var += (vals[p] - mean) * (vals[p] - mean) / paths;
  const double c = 2.0, T = 2.0;
  const double integral = 2.0 / (c * c * c) -
                          std::exp(-c * T) * (T * T / c + 2.0 * T / (c * c) + 2.0 / (c * c * c));
  const double expected = 4.0 * integral;
  CHECK(std::abs(mean - expected) <= 3.0 * std::sqrt(var / paths));
}

TEST_CASE("heat companion satisfies the discrete drift relation") {
  // (Q(t+dt) - Q(t))/dt + |k|^2 Q(t) ~ 2 X(t) to first order in dt
  SolverConfig cfg = base_config(16, 1e-3, 0.0);
  cfg.u0.mode = U0Spec::Mode::Zero;
  cfg.zeta.mode = ZetaSpec::Mode::Off;
  Simulator sim(cfg);
  for (int s = 0; s < 200; ++s) sim.step();
  const VectorField q0 = sim.q();
  const VectorField x0 = sim.x();
  sim.step();
  const VectorField q1 = sim.q();
  const VectorField resid = (1.0 / cfg.dt) * (q1 - q0) - laplacian(q0) - 2.0 * x0;
  // the residual is the stochastic increment scale sqrt(dt), not O(1)
  CHECK(l2_norm(resid) <= 10.0 * std::sqrt(cfg.dt) * (1.0 + l2_norm(x0)));
}

TEST_CASE("pathwise self-convergence of w and Y is first order") {
  SolverConfig cfg = base_config(32, 2e-3, 0.25);
  cfg.u0.norm = 0.5;
  cfg.dt_noise = 5e-4;  // shared noise lattice couples the three runs
  cfg.cadence = 1000;
  Simulator s1(cfg);
  SolverConfig cfg2 = cfg;
  cfg2.dt = 1e-3;
  Simulator s2(cfg2);
  SolverConfig cfg4 = cfg;
  cfg4.dt = 5e-4;
  Simulator s4(cfg4);
  run_to_end(s1, cfg.t_end);
  run_to_end(s2, cfg.t_end);
  run_to_end(s4, cfg.t_end);
  const double ew1 = l2_norm(s1.w() - s2.w());
  const double ew2 = l2_norm(s2.w() - s4.w());
  const double ey1 = l2_norm(s1.y() - s2.y());
  const double ey2 = l2_norm(s2.y() - s4.y());
  CHECK(ew1 / ew2 >= 1.7);
  CHECK(ew1 / ew2 <= 2.3);
  CHECK(ey1 / ey2 >= 1.7);
  CHECK(ey1 / ey2 <= 2.3);
}

TEST_CASE("high-low split: reconstruction, trivial control, path envelope") {
  SolverConfig cfg = base_config(32, 1e-3, 0.3);
  cfg.u0.norm = 0.5;
  Simulator sim(cfg);
  run_to_end(sim, cfg.t_end);
  const Paracalc& pc = sim.paracalc();

  const HighLowSplit sp = split_high_low(sim.w(), sim.q(), sim.lambda(), pc);
  CHECK(l2_norm((sp.w_high + sp.w_low) - sim.w()) <= 1e-12 * std::max(1.0, l2_norm(sim.w())));
  CHECK(divergence_residual(sp.w_high) <= 1e-10);

  VectorField q0(make_grid(32));
  const HighLowSplit trivial = split_high_low(sim.w(), q0, sim.lambda(), pc);
  CHECK(l2_norm(trivial.w_high) == 0.0);
  CHECK(l2_norm(trivial.w_low - sim.w()) == 0.0);

  // control-size envelope along the path tail: delta = 1/3, a = 3 makes the
  // norm growth factor (1+|w|)^{1-a*delta} equal to one
  const double kappa = cfg.kappa;
  const double hs = 1.0 - 2.0 * kappa - 1.0 / 3.0;
  const double c_obs =
      sobolev_norm(sp.w_high, hs) / std::max(1e-12, sim.magnitudes().N());
  CHECK(std::isfinite(c_obs));
  CHECK(c_obs < 100.0);
}

TEST_CASE("runs are deterministic and respect t_end = 0") {
  SolverConfig cfg = base_config(32, 1e-3, 0.1);
  cfg.u0.norm = 0.5;
  const RunResult a = run(cfg);
  const RunResult b = run(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].norm_w == b.rows[i].norm_w);
    CHECK(a.rows[i].norm_wL_H1 == b.rows[i].norm_wL_H1);
    CHECK(a.rows[i].n_kappa == b.rows[i].n_kappa);
  }
  CHECK(l2_norm(a.final_w - b.final_w) == 0.0);

  SolverConfig zero = cfg;
  zero.t_end = 0.0;
  const RunResult r0 = run(zero);
  CHECK(r0.rows.size() == 1);
  CHECK(r0.rows[0].t == 0.0);
  CHECK(r0.status == RunStatus::Ok);
}

TEST_CASE("blow-up guard halts with a suspected explosion") {
  SolverConfig cfg = base_config(16, 1e-3, 0.5);
  cfg.u0.norm = 0.5;
  cfg.ceiling = 0.2;  // below the initial norm; trips on the first step
  const RunResult res = run(cfg);
  CHECK(res.status == RunStatus::ExplosionSuspected);
  CHECK(res.final_time < 0.5);
}

TEST_CASE("noise substeps couple coarse and fine stepping bit-compatibly") {
  GridPtr g = make_grid(16);
  OuEnsemble a(g, 5), b(g, 5);
  a.advance(0.2, 4);        // four substeps in one call
  b.advance(0.1, 2);        // same substeps split across calls
  b.advance(0.1, 2);
  double worst = 0.0;
  for (const Mode& m : g->retained())
    worst = std::max(worst, std::abs(a.states()[m.idx] - b.states()[m.idx]));
  CHECK(worst <= 1e-15);
}
