#include "sns/solver.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "sns/rng.hpp"
#include "sns/snapshot.hpp"

namespace sns {

namespace {

inline double phi1(double z) {
  // (e^z - 1)/z, stable near zero.
  if (std::abs(z) < 1e-8) return 1.0 + 0.5 * z;
  return std::expm1(z) / z;
}

}  // namespace

HighLowSplit split_high_low(const VectorField& w, const VectorField& q, double lambda,
                            const Paracalc& pc) {
  HighLowSplit out;
  out.lambda = lambda;
  out.q_high = pc.highpass(q, lambda);
  out.w_high = leray_project(divergence(pc.para_lt(w, out.q_high)));
  out.w_low = w - out.w_high;
  return out;
}

VectorField build_initial_condition(const SolverConfig& cfg) {
  GridPtr grid = make_grid(cfg.n);
  VectorField u0(grid);
  switch (cfg.u0.mode) {
    case U0Spec::Mode::Zero:
      break;
    case U0Spec::Mode::Shear: {
      // amplitude * (sin x2, 0): modes k = (0, +-1).
      const cplx half_i(0.0, -0.5);
      u0.at1(0, 1) = cfg.u0.amplitude * half_i;
      u0.at1(0, -1) = std::conj(u0.at1(0, 1));
      break;
    }
    case U0Spec::Mode::Random: {
      for (const Mode& m : grid->canonical()) {
        const std::uint32_t id = grid->mode_id(m.k1, m.k2);
        const rng::NormalPair p1 = rng::normal_pair(cfg.seed, rng::kStreamInitial, id, 0, 0);
        const rng::NormalPair p2 = rng::normal_pair(cfg.seed, rng::kStreamInitial, id, 0, 1);
        const double s = std::pow(m.k2n, -0.5 * cfg.u0.decay);
        u0.c1[m.idx] = s * cplx(p1.z0, p1.z1) * M_SQRT1_2;
        u0.c2[m.idx] = s * cplx(p2.z0, p2.z1) * M_SQRT1_2;
        const int neg = grid->index_of(-m.k1, -m.k2);
        u0.c1[neg] = std::conj(u0.c1[m.idx]);
        u0.c2[neg] = std::conj(u0.c2[m.idx]);
      }
      u0 = leray_project(u0);
      const double nn = l2_norm(u0);
      if (nn > 0.0 && cfg.u0.norm > 0.0) u0 = (cfg.u0.norm / nn) * u0;
      if (cfg.u0.norm == 0.0) u0 = 0.0 * u0;
      break;
    }
  }
  u0 = leray_project(u0);
  return u0;
}

Simulator::Simulator(const SolverConfig& cfg)
    : cfg_(cfg),
      grid_(make_grid(cfg.n)),
      pc_(grid_, cfg.dealias),
      ens_(grid_, cfg.seed),
      w_(grid_),
      y_(grid_),
      q_(grid_),
      x_(grid_),
      zeta_det_(grid_) {
  const double dtn = cfg_.dt_noise > 0.0 ? cfg_.dt_noise : cfg_.dt;
  nsub_ = static_cast<int>(std::llround(cfg_.dt / dtn));
  if (nsub_ < 1 || std::abs(nsub_ * dtn - cfg_.dt) > 1e-9 * cfg_.dt)
    throw std::invalid_argument("dt must be an integer multiple of dt_noise");

  mag_.kappa = cfg_.kappa;
  w_ = build_initial_condition(cfg_);
  if (cfg_.zeta.mode == ZetaSpec::Mode::Deterministic)
    zeta_det_ = leray_project(read_snapshot(cfg_.zeta.path));

  const double u0n = l2_norm(w_);
  const int i0 = static_cast<int>(std::floor(u0n));
  for (int i = 0; i <= i0; ++i) ledger_.push_back({i, 0.0});
  segment_ = i0;
  lambda_ = std::pow(1.0 + std::ceil(u0n), cfg_.a);
  if (lambda_ < 1.0) lambda_ = 1.0;
}

void apply_threshold_rule(double norm_w, double t, double a, int& segment, double& lambda,
                          std::vector<LedgerEntry>& ledger) {
  while (norm_w >= segment + 1.0) {
    ++segment;
    ledger.push_back({segment, t});
    lambda = std::pow(1.0 + segment, a);
  }
}

void Simulator::update_ledger() {
  apply_threshold_rule(l2_norm(w_), t_, cfg_.a, segment_, lambda_, ledger_);
}

void Simulator::freeze_x(const VectorField& x) {
  if (x.grid->n() != grid_->n()) throw std::invalid_argument("freeze_x: grid mismatch");
  x_ = x;
}

void Simulator::step() {
  if (status_ != RunStatus::Ok) return;
  const double dt = cfg_.dt;

  // Nonlinearities at the step start.
  const VectorField d_field = 2.0 * (x_ + y_);
  MatrixField mw = symmetric_tensor_product(w_, w_, cfg_.dealias);
  mw = mw + symmetric_tensor_product(d_field, w_, cfg_.dealias);
  mw = mw + symmetric_tensor_product(y_, y_, cfg_.dealias);
  const VectorField nw = leray_project(divergence(mw));

  MatrixField my = 2.0 * symmetric_tensor_product(x_, y_, cfg_.dealias);
  my = my + symmetric_tensor_product(x_, x_, cfg_.dealias);
  const VectorField ny = leray_project(divergence(my));

  // Perturbation: exact stochastic convolution over the step (spectral
  // mode), or the heat-integrated constant field (deterministic mode).
  VectorField zc(grid_);
  if (cfg_.zeta.mode == ZetaSpec::Mode::Spectral) {
    zc = zeta_convolution_increment(cfg_.zeta, grid_, cfg_.seed, ens_.substeps_taken(), nsub_, dt);
  }

  // Exponential Euler on the mild form: the heat factor is exact, the
  // nonlinearity enters through phi1.
  for (const Mode& m : grid_->retained()) {
    const double e = std::exp(-m.k2n * dt);
    const double f = dt * phi1(-m.k2n * dt);
    y_.c1[m.idx] = e * y_.c1[m.idx] + f * ny.c1[m.idx] + zc.c1[m.idx];
    y_.c2[m.idx] = e * y_.c2[m.idx] + f * ny.c2[m.idx] + zc.c2[m.idx];
    w_.c1[m.idx] = e * w_.c1[m.idx] + f * nw.c1[m.idx];
    w_.c2[m.idx] = e * w_.c2[m.idx] + f * nw.c2[m.idx];
  }
  if (cfg_.zeta.mode == ZetaSpec::Mode::Deterministic) {
    for (const Mode& m : grid_->retained()) {
      const double f = dt * phi1(-m.k2n * dt);
      y_.c1[m.idx] += f * zeta_det_.c1[m.idx];
      y_.c2[m.idx] += f * zeta_det_.c2[m.idx];
    }
  }
  w_ = leray_project(w_);
  y_ = leray_project(y_);

  // Advance the noise path; Q is driven by the same increments, so the
  // (X, Q) pair stays exact in law.
  if (cfg_.noise_on) {
    const std::vector<cplx> f_before = ens_.states();
    const OuEnsemble::StepIncrements inc = ens_.advance(dt, nsub_);
    const CutoffPair& cut = pc_.cutoff();
    for (const Mode& m : grid_->canonical()) {
      const double nk = std::sqrt(m.k2n);
      const double lm = cut.l(nk / cfg_.moll_level);
      const double e = std::exp(-m.k2n * dt);
      const cplx drive = 2.0 * lm * (dt * e * f_before[m.idx] + inc.gj[m.idx]);
      const double d1 = m.k2 / nk;
      const double d2 = -m.k1 / nk;
      const int neg = grid_->index_of(-m.k1, -m.k2);
      q_.c1[m.idx] = e * q_.c1[m.idx] + drive * d1;
      q_.c2[m.idx] = e * q_.c2[m.idx] + drive * d2;
      q_.c1[neg] = std::conj(q_.c1[m.idx]);
      q_.c2[neg] = std::conj(q_.c2[m.idx]);
    }
  } else {
    q_ = heat_propagate(q_, dt);
  }

  ++steps_;
  t_ = static_cast<double>(steps_) * dt;
  if (cfg_.noise_on) x_ = assemble_X(ens_, pc_.cutoff(), cfg_.moll_level);

  const double nrm = l2_norm(w_);
  if (!std::isfinite(nrm) || !is_finite(w_) || !is_finite(y_)) {
    status_ = RunStatus::NumericNan;
    return;
  }
  if (nrm > cfg_.ceiling) {
    status_ = RunStatus::ExplosionSuspected;
    return;
  }
  update_ledger();
}

TrajectoryRow Simulator::make_row() {
  mag_.observe_fields(t_, x_, y_, pc_);
  const double r =
      zeroth_chaos_constant(lambda_, t_, pc_.cutoff(), *grid_, cfg_.moll_level);
  mag_.observe_enhanced(t_, lambda_, enhanced_product(x_, lambda_, r, pc_), pc_);

  const HighLowSplit split = split_high_low(w_, q_, lambda_, pc_);
  TrajectoryRow row;
  row.t = t_;
  row.norm_w = l2_norm(w_);
  row.norm_wL = l2_norm(split.w_low);
  row.norm_wL_H1 = sobolev_norm(split.w_low, 1.0);
  row.norm_wH = l2_norm(split.w_high);
  row.lambda = lambda_;
  row.segment = segment_;
  row.n_kappa = mag_.N();
  return row;
}

RunResult run(const SolverConfig& cfg, const SnapshotCallback& on_snapshot,
              const FieldCallback& on_field) {
  Simulator sim(cfg);
  RunResult result;

  struct Past {
    double t;
    int segment;
    double lambda;
    VectorField w, q, x, y;
    bool row_point;
    double n_kappa;
  };
  std::deque<Past> window;

  auto record = [&](bool row_point) {
    TrajectoryRow row;
    if (row_point) {
      row = sim.make_row();
      result.rows.push_back(row);
    }
    window.push_back({sim.t(), sim.segment(), sim.lambda(), sim.w(), sim.q(), sim.x(), sim.y(),
                      row_point, row.n_kappa});
    if (window.size() > 3) window.pop_front();
    if (on_snapshot && window.size() == 3) {
      const Past& a = window[0];
      const Past& b = window[1];
      const Past& c = window[2];
      if (b.row_point && a.segment == b.segment && b.segment == c.segment) {
        StateSnapshot snap;
        snap.t = b.t;
        snap.dt = cfg.dt;
        snap.lambda = b.lambda;
        snap.segment = b.segment;
        snap.kappa = cfg.kappa;
        snap.n_kappa = b.n_kappa;
        snap.r = zeroth_chaos_constant(b.lambda, b.t, sim.paracalc().cutoff(),
                                       sim.paracalc().grid(), cfg.moll_level);
        snap.w_prev = a.w;
        snap.w = b.w;
        snap.w_next = c.w;
        snap.q_prev = a.q;
        snap.q = b.q;
        snap.q_next = c.q;
        snap.x = b.x;
        snap.y = b.y;
        on_snapshot(snap);
      }
    }
    if (cfg.store_fields && row_point) result.stored_fields.emplace_back(sim.t(), sim.w());
  };

  const std::uint64_t total_steps =
      static_cast<std::uint64_t>(std::llround(cfg.t_end / cfg.dt));
  record(true);
  if (on_field) on_field(0.0, 0, sim.w());
  for (std::uint64_t s = 1; s <= total_steps; ++s) {
    sim.step();
    if (sim.status() != RunStatus::Ok) break;
    const bool row_point =
        (s % static_cast<std::uint64_t>(cfg.cadence) == 0) || s == total_steps;
    record(row_point);
    if (on_field && cfg.snapshot_every > 0 &&
        s % static_cast<std::uint64_t>(cfg.snapshot_every) == 0)
      on_field(sim.t(), s, sim.w());
  }
  result.status = sim.status();
  result.ledger = sim.ledger();
  result.final_time = sim.t();
  result.final_w = sim.w();
  result.magnitudes = sim.magnitudes();
  if (on_field) on_field(sim.t(), sim.steps(), sim.w());
  return result;
}

}  // namespace sns
