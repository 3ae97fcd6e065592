#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "sns/field.hpp"
#include "sns/paracalc.hpp"

namespace sns {

inline constexpr double kNoMollification = std::numeric_limits<double>::infinity();

// Per-mode Ornstein-Uhlenbeck states F_t(k) realising the linear solution
// exactly in law.  Canonical modes (k1 > 0, or k1 == 0 and k2 > 0) hold the
// draws; Hermitian partners mirror them, F(-k) = conj F(k).  Alongside the
// state update the ensemble accumulates, per step, the exact heat-convolution
// increments needed to advance the heat-driven companion field:
//   gf = int e^{-|k|^2 (t+d-s)} dzeta_s,    gj = int (t+d-s) e^{-|k|^2 (t+d-s)} dzeta_s,
// drawn jointly with the correct 2x2 covariance.  Increments compose exactly
// across substeps, so runs whose steps are multiples of a common substep
// width traverse the same path.
class OuEnsemble {
 public:
  OuEnsemble(GridPtr grid, std::uint64_t seed);

  const GridPtr& grid() const { return grid_; }
  double t() const { return t_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t substeps_taken() const { return substep_; }
  const std::vector<cplx>& states() const { return f_; }

  struct StepIncrements {
    double dt = 0.0;
    std::vector<cplx> gf;  // per-site, FFT order
    std::vector<cplx> gj;
  };

  // Advance by dt split into nsub equal exact substeps; returns the composed
  // step increments.  dt must be positive.
  StepIncrements advance(double dt, int nsub = 1);

 private:
  GridPtr grid_;
  std::uint64_t seed_;
  double t_ = 0.0;
  std::uint64_t substep_ = 0;
  std::vector<cplx> f_;
};

// X = sum_k F(k) d_k e_k with d_k the unit divergence-free direction of the
// pair; an optional mollification level applies the smooth lowpass factor
// l(|k|/level) (exactly 1 when level is kNoMollification).
VectorField assemble_X(const OuEnsemble& ens, const CutoffPair& cut,
                       double moll_level = kNoMollification);

// One exact draw of X_t from scratch (time-0 start), keyed by sample index;
// used by Monte-Carlo estimators.  Deterministic in (seed, sample).
VectorField sample_X_exact(GridPtr grid, std::uint64_t seed, double t, std::uint64_t sample,
                           const CutoffPair& cut, double moll_level = kNoMollification);

// Renormalisation constants.  Lemma keeps the printed single cutoff weight
// l(|k|/lambda) l(|k|/n); Proof squares the weights, which is the form the
// zeroth-chaos computation produces for a smooth cutoff.
enum class RenormForm { Lemma, Proof };

double renorm_constant(double lambda, double t, const CutoffPair& cut, const FourierGrid& grid,
                       RenormForm form = RenormForm::Proof);
double renorm_constant_n(double lambda, double n_level, double t, const CutoffPair& cut,
                         const FourierGrid& grid, RenormForm form = RenormForm::Proof);

// Exact mean of the resonant diagonal for this implementation's noise
// normalisation: twice the Proof-form lattice sum.  This is the constant the
// dynamics subtract so that the enhanced product is centred.
double zeroth_chaos_constant(double lambda, double t, const CutoffPair& cut,
                             const FourierGrid& grid,
                             double n_level = kNoMollification);

// 2 grad_sym L_lambda X (the operator's matrix potential).
MatrixField potential_matrix(const VectorField& x, double lambda, const Paracalc& pc);

// P^lambda = (-Lap/2 + 1)^{-1} 2 grad_sym L_lambda X.
MatrixField build_P_lambda(const VectorField& x, double lambda, const Paracalc& pc);

// (2 grad_sym L_lambda X) resonant P^lambda - r Id; r is supplied by the
// caller (zeroth_chaos_constant for a centred product).
MatrixField enhanced_product(const VectorField& x, double lambda, double r, const Paracalc& pc);

// ----- perturbation ------------------------------------------------------

struct ZetaSpec {
  enum class Mode { Off, Spectral, Deterministic };
  Mode mode = Mode::Spectral;
  double sigma = 1.0;
  double theta = 0.5;
  std::string path;  // SNSF snapshot for the deterministic mode
};

// Raw white-in-time increment over a step of width delta: independent
// per-mode Gaussian coefficients with sd sigma |k|^{-theta} sqrt(delta),
// Leray-projected.  Deterministic in (seed, counter).
VectorField sample_zeta(const ZetaSpec& spec, double delta, GridPtr grid, std::uint64_t seed,
                        std::uint64_t counter);

// Exact stochastic heat convolution of the spectral perturbation over one
// step of nsub substeps: int e^{-|k|^2 (t+dt-s)} dzeta_s, composed exactly
// across substeps (zero field for the Off mode).
VectorField zeta_convolution_increment(const ZetaSpec& spec, GridPtr grid, std::uint64_t seed,
                                       std::uint64_t substep0, int nsub, double dt);

// ----- stochastic bundles and magnitudes ---------------------------------

struct StochasticObjects {
  double t = 0.0;
  VectorField X;
  VectorField Q;
  std::map<double, MatrixField> P_by_level;
  std::map<double, MatrixField> enhanced_by_level;
  std::map<double, double> r_by_level;  // subtraction constants actually used
};

StochasticObjects build_stochastic_objects(const VectorField& x, const VectorField& q, double t,
                                           const std::vector<double>& levels, const Paracalc& pc,
                                           double n_level = kNoMollification);

// Running magnitudes L^kappa and N^kappa.  The level supremum runs over the
// cutoff levels probed so far, sampled at the audit cadence.
struct NoiseMagnitudes {
  double kappa = 0.1;
  double t = 0.0;
  double L = 1.0;
  double sup_enhanced = 0.0;
  std::vector<double> levels_probed;

  double N() const { return L + sup_enhanced; }

  void observe_fields(double time, const VectorField& x, const VectorField& y,
                      const Paracalc& pc);
  void observe_enhanced(double time, double lambda, const MatrixField& enhanced,
                        const Paracalc& pc);
};

}  // namespace sns
