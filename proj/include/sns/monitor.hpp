#pragma once

#include <vector>

#include "sns/solver.hpp"

namespace sns {

// Per-step energy decomposition of d/dt |w_low|^2 into the four audited
// pairings, plus the split-Laplacian identity pieces and the norms the
// bound calibration needs.
struct EnergyReport {
  double t = 0.0;
  double lambda = 1.0;
  int segment = 0;
  double r = 0.0;

  double term1 = 0.0;  // operator line (low-passed drift)
  double term2 = 0.0;  // high-pass interpolation line
  double term3 = 0.0;  // high-frequency component line
  double term4 = 0.0;  // quadratic/commutator/perturbation line
  double term4_quad = 0.0;  // the <w_low, div(w (x)_s w)> part of term4

  // Split-Laplacian pieces; the exact identity for divergence-free data is
  // term1 = -(3/2)|w_low|_{H1}^2 + qform + r_term.
  double h1_part = 0.0;  // -(1/2) |w_low|_{H1}^2
  double qform = 0.0;    // <w_low, A w_low>
  double r_term = 0.0;   // r |w_low|^2

  double fd_derivative = 0.0;  // centred difference of |w_low|^2
  double residual = 0.0;       // fd_derivative - sum of terms
  double lap_split_residual = 0.0;  // relative, two-sided evaluation
  double bound_slack = 0.0;         // filled in by the calibration pass

  double norm_wL = 0.0;
  double norm_wL_H1 = 0.0;
  double norm_wL_Hs = 0.0;    // H^{1 - 3 kappa / 2}
  double norm_wL_Heta = 0.0;  // H^{3/4 + 2 kappa}
  double frac_energy = 0.0;   // |w_low|_{H^eps}^2
  double frac_energy_deriv = 0.0;
  double n_kappa = 1.0;
  double kappa = 0.1;
};

// Evaluates the decomposition on one three-step snapshot; eps_frac is the
// fractional-energy exponent (must lie in (0, kappa)).
EnergyReport energy_terms(const StateSnapshot& snap, const Paracalc& pc, double eps_frac);

// Fit-then-validate protocol for the drift bound: C is 1.1 x the largest
// ratio observed on the calibration half, k is the smallest exponent in
// {1,2,3} with no violations on the validation half.
struct EnergyCalibration {
  double C = 0.0;
  int k = 1;
  int violations = 0;  // on the validation half
  int checked = 0;
  double min_slack = 0.0;
};

double energy_bound_slack(const EnergyReport& rep, double C, int k);
EnergyCalibration calibrate_energy_bound(std::vector<EnergyReport>& reports);

// Lower bound on the gap between consecutive threshold crossings.  The
// leading constant is clamped at one so the bound stays finite as C -> 0.
double interval_lower_bound(int i, double c);

// Double-exponential envelope: fit c on [0, fit_end], count violations of
// |w_t| <= exp(exp(c t)) + margin afterwards.
struct EnvelopeResult {
  double c = 0.0;
  int violations = 0;
  bool degenerate = false;
};
EnvelopeResult growth_envelope(const std::vector<TrajectoryRow>& rows, double fit_end,
                               double margin = 1e-9);

// |w|_{H^eps}^2 for the boundedness audit.
double fractional_energy(const VectorField& w, double eps);

// High-low norm |w_low|_{H^1} + |w_high|_{C^{1-3kappa}_4} at level lambda.
struct HlNormValue {
  double lambda = 1.0;
  double low_h1 = 0.0;
  double high_c4 = 0.0;
  double value = 0.0;
};
HlNormValue hl_norm(const VectorField& w, const VectorField& q, double lambda, double kappa,
                    const Paracalc& pc);

// Least-squares slope of y against t with a normal-approximation t-statistic;
// used for the "no growth trend" check on fractional energies.
struct TrendFit {
  double slope = 0.0;
  double t_stat = 0.0;
};
TrendFit linear_trend(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace sns
