#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sns/anderson.hpp"
#include "sns/field.hpp"
#include "sns/noise.hpp"
#include "sns/paracalc.hpp"

namespace sns {

struct U0Spec {
  enum class Mode { Zero, Shear, Random };
  Mode mode = Mode::Random;
  double norm = 0.5;       // target L2 norm (random mode)
  double decay = 2.0;      // spectral decay exponent (random mode)
  double amplitude = 1.0;  // shear amplitude
};

struct SolverConfig {
  int n = 0;
  std::uint64_t seed = 0;
  double dt = 5e-4;
  double t_end = 2.0;
  double kappa = 0.1;
  double a = 3.0;  // level schedule exponent, (2, 3]
  ZetaSpec zeta;
  U0Spec u0;
  double ceiling = 1e6;  // L2 blow-up guard
  bool dealias = true;
  bool noise_on = true;  // driving noise (off: X stays zero, Q undriven)
  int cadence = 10;         // audit/output cadence in steps
  int snapshot_every = 0;   // field snapshot stride in steps (0 = final only)
  double dt_noise = 0.0;    // noise substep width (0 = dt); dt must be a multiple
  std::string out_dir = "sns_out";
  double moll_level = kNoMollification;  // smooth-approximation level
  bool store_fields = false;             // keep w at cadence in the result
};

// Parses and validates the documented key=value config keys.
SolverConfig load_solver_config(const std::string& path);

enum class RunStatus { Ok, ExplosionSuspected, NumericNan };

struct LedgerEntry {
  int i;
  double time;
};

struct TrajectoryRow {
  double t = 0.0;
  double norm_w = 0.0;
  double norm_wL = 0.0;
  double norm_wL_H1 = 0.0;
  double norm_wH = 0.0;
  double lambda = 1.0;
  int segment = 0;
  double n_kappa = 1.0;
};

struct HighLowSplit {
  VectorField w_high;
  VectorField w_low;
  VectorField q_high;
  double lambda = 1.0;
};

// w_high = P div(w =< H_lambda Q), w_low = w - w_high.
HighLowSplit split_high_low(const VectorField& w, const VectorField& q, double lambda,
                            const Paracalc& pc);

// Stopping-time bookkeeping: while |w| has reached the next threshold i+1,
// record T_{i+1} = t, advance the segment and jump the cutoff level to
// (1 + i + 1)^a.  Thresholds skipped within one step all record the same t.
void apply_threshold_rule(double norm_w, double t, double a, int& segment, double& lambda,
                          std::vector<LedgerEntry>& ledger);

// Everything the energy audit needs about three consecutive steps; the split
// and all pairings are evaluated at the middle state's cutoff level.
struct StateSnapshot {
  double t = 0.0;
  double dt = 0.0;
  double lambda = 1.0;
  int segment = 0;
  double r = 0.0;        // zeroth-chaos constant at (lambda, t)
  double n_kappa = 1.0;  // magnitude observed so far
  double kappa = 0.1;
  VectorField w_prev, w, w_next;
  VectorField q_prev, q, q_next;
  VectorField x, y;
};

// Time integration of the coupled (Q, Y, w) hierarchy with the stopping-time
// ledger.  One Simulator instance is one trajectory; all randomness flows
// from config.seed through counter-based streams.
class Simulator {
 public:
  explicit Simulator(const SolverConfig& cfg);

  void step();  // advance by cfg.dt
  double t() const { return t_; }
  std::uint64_t steps() const { return steps_; }
  const VectorField& w() const { return w_; }
  const VectorField& y() const { return y_; }
  const VectorField& q() const { return q_; }
  const VectorField& x() const { return x_; }
  double lambda() const { return lambda_; }
  int segment() const { return segment_; }
  const std::vector<LedgerEntry>& ledger() const { return ledger_; }
  const Paracalc& paracalc() const { return pc_; }
  const SolverConfig& config() const { return cfg_; }
  NoiseMagnitudes& magnitudes() { return mag_; }
  RunStatus status() const { return status_; }

  TrajectoryRow make_row();  // updates magnitudes, then reports norms

  // Pins the driving field (only meaningful with noise off); used to study
  // the stepper against frozen-coefficient references.
  void freeze_x(const VectorField& x);

 private:
  SolverConfig cfg_;
  GridPtr grid_;
  Paracalc pc_;
  OuEnsemble ens_;
  VectorField w_, y_, q_, x_;
  VectorField zeta_det_;  // deterministic perturbation field (optional mode)
  double t_ = 0.0;
  std::uint64_t steps_ = 0;
  int nsub_ = 1;
  int segment_ = 0;
  double lambda_ = 1.0;
  std::vector<LedgerEntry> ledger_;
  NoiseMagnitudes mag_;
  RunStatus status_ = RunStatus::Ok;

  void update_ledger();
};

struct RunResult {
  RunStatus status = RunStatus::Ok;
  std::vector<TrajectoryRow> rows;
  std::vector<LedgerEntry> ledger;
  double final_time = 0.0;
  VectorField final_w;
  NoiseMagnitudes magnitudes;
  std::vector<std::pair<double, VectorField>> stored_fields;  // (t, w) at cadence
};

using SnapshotCallback = std::function<void(const StateSnapshot&)>;
using FieldCallback = std::function<void(double t, std::uint64_t step, const VectorField& w)>;

// Drives a Simulator from 0 to t_end, emitting trajectory rows at the audit
// cadence, centred three-step snapshots for the energy monitor, and field
// dumps at the snapshot stride.  Deterministic under a fixed config.
RunResult run(const SolverConfig& cfg, const SnapshotCallback& on_snapshot = {},
              const FieldCallback& on_field = {});

VectorField build_initial_condition(const SolverConfig& cfg);

}  // namespace sns
