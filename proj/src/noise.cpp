#include "sns/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sns/rng.hpp"
#include "sns/snapshot.hpp"

namespace sns {

namespace {

constexpr std::uint32_t kStreamChaos = 6;

inline cplx std_complex_normal(std::uint64_t seed, std::uint32_t tag, std::uint32_t mode,
                               std::uint64_t counter, std::uint32_t slot) {
  const rng::NormalPair p = rng::normal_pair(seed, tag, mode, counter, slot);
  return cplx(p.z0, p.z1) * M_SQRT1_2;  // E|z|^2 = 1
}

struct OuMoments {
  double decay;   // e^{-a h}
  double var_f;   // (1 - e^{-2ah}) / (2a)
  double var_j;   // int_0^h u^2 e^{-2au} du
  double cov_fj;  // int_0^h u e^{-2au} du
};

OuMoments ou_moments(double a, double h) {
  const double e = std::exp(-a * h);
  const double e2 = e * e;
  OuMoments m;
  m.decay = e;
  m.var_f = (1.0 - e2) / (2.0 * a);
  m.cov_fj = (1.0 - e2 * (1.0 + 2.0 * a * h)) / (4.0 * a * a);
  m.var_j = (1.0 - e2 * (2.0 * a * a * h * h + 2.0 * a * h + 1.0)) / (4.0 * a * a * a);
  return m;
}

}  // namespace

OuEnsemble::OuEnsemble(GridPtr grid, std::uint64_t seed)
    : grid_(std::move(grid)), seed_(seed), f_(grid_->size(), cplx{}) {}

OuEnsemble::StepIncrements OuEnsemble::advance(double dt, int nsub) {
  if (dt <= 0.0) throw std::invalid_argument("evolve: step must be positive");
  if (nsub < 1) throw std::invalid_argument("evolve: substep count must be >= 1");
  const double h = dt / nsub;
  StepIncrements inc;
  inc.dt = dt;
  inc.gf.assign(grid_->size(), cplx{});
  inc.gj.assign(grid_->size(), cplx{});
  for (int s = 0; s < nsub; ++s) {
    const std::uint64_t ctr = substep_ + static_cast<std::uint64_t>(s);
    for (const Mode& m : grid_->canonical()) {
      const OuMoments mo = ou_moments(m.k2n, h);
      const std::uint32_t id = grid_->mode_id(m.k1, m.k2);
      const cplx z1 = std_complex_normal(seed_, rng::kStreamOu, id, ctr, 0);
      const cplx z2 = std_complex_normal(seed_, rng::kStreamOuAux, id, ctr, 0);
      const double sf = std::sqrt(mo.var_f);
      const cplx gf_sub = sf * z1;
      const double resid = std::max(0.0, mo.var_j - mo.cov_fj * mo.cov_fj / mo.var_f);
      const cplx gj_sub = (mo.cov_fj / sf) * z1 + std::sqrt(resid) * z2;

      const int neg = grid_->index_of(-m.k1, -m.k2);
      // compose the step increments before touching the state
      inc.gj[m.idx] = mo.decay * (inc.gj[m.idx] + h * inc.gf[m.idx]) + gj_sub;
      inc.gf[m.idx] = mo.decay * inc.gf[m.idx] + gf_sub;
      f_[m.idx] = mo.decay * f_[m.idx] + gf_sub;
      inc.gj[neg] = std::conj(inc.gj[m.idx]);
      inc.gf[neg] = std::conj(inc.gf[m.idx]);
      f_[neg] = std::conj(f_[m.idx]);
    }
  }
  substep_ += static_cast<std::uint64_t>(nsub);
  t_ += dt;
  return inc;
}

VectorField assemble_X(const OuEnsemble& ens, const CutoffPair& cut, double moll_level) {
  VectorField x(ens.grid());
  const auto& f = ens.states();
  for (const Mode& m : ens.grid()->canonical()) {
    const double nk = std::sqrt(m.k2n);
    const double d1 = m.k2 / nk;
    const double d2 = -m.k1 / nk;
    const double w = cut.l(nk / moll_level);
    const int neg = ens.grid()->index_of(-m.k1, -m.k2);
    x.c1[m.idx] = w * f[m.idx] * d1;
    x.c2[m.idx] = w * f[m.idx] * d2;
    x.c1[neg] = std::conj(x.c1[m.idx]);
    x.c2[neg] = std::conj(x.c2[m.idx]);
  }
  x.divergence_free = true;
  return x;
}

VectorField sample_X_exact(GridPtr grid, std::uint64_t seed, double t, std::uint64_t sample,
                           const CutoffPair& cut, double moll_level) {
  VectorField x(grid);
  for (const Mode& m : grid->canonical()) {
    const double nk = std::sqrt(m.k2n);
    const double var = t > 0.0 ? (1.0 - std::exp(-2.0 * m.k2n * t)) / (2.0 * m.k2n) : 0.0;
    const cplx z = std_complex_normal(seed, kStreamChaos, grid->mode_id(m.k1, m.k2), sample, 0);
    const cplx f = std::sqrt(var) * z;
    const double w = cut.l(nk / moll_level);
    const double d1 = m.k2 / nk;
    const double d2 = -m.k1 / nk;
    const int neg = grid->index_of(-m.k1, -m.k2);
    x.c1[m.idx] = w * f * d1;
    x.c2[m.idx] = w * f * d2;
    x.c1[neg] = std::conj(x.c1[m.idx]);
    x.c2[neg] = std::conj(x.c2[m.idx]);
  }
  x.divergence_free = true;
  return x;
}

double renorm_constant_n(double lambda, double n_level, double t, const CutoffPair& cut,
                         const FourierGrid& grid, RenormForm form) {
  if (lambda < 1.0 || n_level < 1.0)
    throw std::invalid_argument("renorm constant: levels must be >= 1");
  double sum = 0.0;
  for (const Mode& m : grid.retained()) {
    const double nk = std::sqrt(m.k2n);
    double w = cut.l(nk / lambda) * cut.l(nk / n_level);
    if (form == RenormForm::Proof) w *= w;
    if (w == 0.0) continue;
    sum += w / (m.k2n / 2.0 + 1.0) * (1.0 - std::exp(-2.0 * m.k2n * t));
  }
  return 0.25 * sum;
}

double renorm_constant(double lambda, double t, const CutoffPair& cut, const FourierGrid& grid,
                       RenormForm form) {
  return renorm_constant_n(lambda, kNoMollification, t, cut, grid, form);
}

double zeroth_chaos_constant(double lambda, double t, const CutoffPair& cut,
                             const FourierGrid& grid, double n_level) {
  return 2.0 * renorm_constant_n(lambda, n_level, t, cut, grid, RenormForm::Proof);
}

MatrixField potential_matrix(const VectorField& x, double lambda, const Paracalc& pc) {
  return 2.0 * sym_gradient(pc.lowpass(x, lambda));
}

MatrixField build_P_lambda(const VectorField& x, double lambda, const Paracalc& pc) {
  MatrixField p = potential_matrix(x, lambda, pc);
  for (const Mode& m : p.grid->retained()) {
    const double f = 1.0 / (m.k2n / 2.0 + 1.0);
    p.m11[m.idx] *= f;
    p.m12[m.idx] *= f;
    p.m21[m.idx] *= f;
    p.m22[m.idx] *= f;
  }
  return p;
}

MatrixField enhanced_product(const VectorField& x, double lambda, double r, const Paracalc& pc) {
  const MatrixField pot = potential_matrix(x, lambda, pc);
  MatrixField p = pot;
  for (const Mode& m : p.grid->retained()) {
    const double f = 1.0 / (m.k2n / 2.0 + 1.0);
    p.m11[m.idx] *= f;
    p.m12[m.idx] *= f;
    p.m21[m.idx] *= f;
    p.m22[m.idx] *= f;
  }
  MatrixField out = pc.resonant_matmat(pot, p);
  const int z = out.grid->index_of(0, 0);
  out.m11[z] -= r;
  out.m22[z] -= r;
  return out;
}

VectorField sample_zeta(const ZetaSpec& spec, double delta, GridPtr grid, std::uint64_t seed,
                        std::uint64_t counter) {
  if (delta <= 0.0) throw std::invalid_argument("sample_zeta: step must be positive");
  VectorField z(grid);
  switch (spec.mode) {
    case ZetaSpec::Mode::Off:
      z.divergence_free = true;
      return z;
    case ZetaSpec::Mode::Deterministic: {
      VectorField path = read_snapshot(spec.path);
      if (path.grid->n() != grid->n())
        throw std::invalid_argument("deterministic perturbation grid mismatch");
      return delta * leray_project(path);
    }
    case ZetaSpec::Mode::Spectral:
      break;
  }
  const double sq = std::sqrt(delta);
  for (const Mode& m : grid->canonical()) {
    const std::uint32_t id = grid->mode_id(m.k1, m.k2);
    const double sd = spec.sigma * std::pow(m.k2n, -0.5 * spec.theta) * sq;
    z.c1[m.idx] = sd * std_complex_normal(seed, rng::kStreamZeta, id, counter, 0);
    z.c2[m.idx] = sd * std_complex_normal(seed, rng::kStreamZeta, id, counter, 1);
    const int neg = grid->index_of(-m.k1, -m.k2);
    z.c1[neg] = std::conj(z.c1[m.idx]);
    z.c2[neg] = std::conj(z.c2[m.idx]);
  }
  return leray_project(z);
}

VectorField zeta_convolution_increment(const ZetaSpec& spec, GridPtr grid, std::uint64_t seed,
                                       std::uint64_t substep0, int nsub, double dt) {
  VectorField z(grid);
  if (spec.mode != ZetaSpec::Mode::Spectral) {
    z.divergence_free = true;
    return z;
  }
  if (dt <= 0.0 || nsub < 1) throw std::invalid_argument("zeta increment: bad step");
  const double h = dt / nsub;
  for (const Mode& m : grid->canonical()) {
    const std::uint32_t id = grid->mode_id(m.k1, m.k2);
    const double a = m.k2n;
    const double decay = std::exp(-a * h);
    const double sd =
        spec.sigma * std::pow(a, -0.5 * spec.theta) * std::sqrt((1.0 - decay * decay) / (2.0 * a));
    cplx acc1{}, acc2{};
    for (int s = 0; s < nsub; ++s) {
      const std::uint64_t ctr = substep0 + static_cast<std::uint64_t>(s);
      acc1 = decay * acc1 + sd * std_complex_normal(seed, rng::kStreamZeta, id, ctr, 0);
      acc2 = decay * acc2 + sd * std_complex_normal(seed, rng::kStreamZeta, id, ctr, 1);
    }
    z.c1[m.idx] = acc1;
    z.c2[m.idx] = acc2;
    const int neg = grid->index_of(-m.k1, -m.k2);
    z.c1[neg] = std::conj(acc1);
    z.c2[neg] = std::conj(acc2);
  }
  return leray_project(z);
}

StochasticObjects build_stochastic_objects(const VectorField& x, const VectorField& q, double t,
                                           const std::vector<double>& levels, const Paracalc& pc,
                                           double n_level) {
  StochasticObjects so;
  so.t = t;
  so.X = x;
  so.Q = q;
  for (double lam : levels) {
    const double r = zeroth_chaos_constant(lam, t, pc.cutoff(), pc.grid(), n_level);
    so.P_by_level.emplace(lam, build_P_lambda(x, lam, pc));
    so.enhanced_by_level.emplace(lam, enhanced_product(x, lam, r, pc));
    so.r_by_level.emplace(lam, r);
  }
  return so;
}

void NoiseMagnitudes::observe_fields(double time, const VectorField& x, const VectorField& y,
                                     const Paracalc& pc) {
  const double nx = pc.besov_norm(x, -kappa, kLpInf, kLpInf);
  const double ny = pc.besov_norm(y, 2.0 * kappa, kLpInf, kLpInf);
  L = std::max(L, 1.0 + nx + ny);
  t = std::max(t, time);
}

void NoiseMagnitudes::observe_enhanced(double time, double lambda, const MatrixField& enhanced,
                                       const Paracalc& pc) {
  const double ne = pc.besov_norm(enhanced, -kappa, kLpInf, kLpInf);
  sup_enhanced = std::max(sup_enhanced, ne);
  if (std::find(levels_probed.begin(), levels_probed.end(), lambda) == levels_probed.end())
    levels_probed.push_back(lambda);
  t = std::max(t, time);
}

}  // namespace sns
