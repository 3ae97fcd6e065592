#include "sns/anderson.hpp"

#include <cmath>
#include <stdexcept>

#include "sns/rng.hpp"

namespace sns {

OperatorHandle make_operator(const VectorField& x, double lambda, double r, const Paracalc& pc) {
  OperatorHandle op;
  op.grid = x.grid;
  op.lambda = lambda;
  op.r = r;
  op.dealias = pc.dealias();
  op.potential = potential_matrix(x, lambda, pc);

  double any = 0.0;
  for (const Mode& m : op.grid->retained()) {
    any += std::norm(op.potential.m11[m.idx]) + std::norm(op.potential.m12[m.idx]) +
           std::norm(op.potential.m22[m.idx]);
  }
  op.potential_zero = (any == 0.0);
  if (!op.potential_zero) {
    op.pad = pad_size(*op.grid, op.dealias);
    to_physical(*op.grid, op.potential.m11, op.pad, op.phys11);
    to_physical(*op.grid, op.potential.m12, op.pad, op.phys12);
    to_physical(*op.grid, op.potential.m21, op.pad, op.phys21);
    to_physical(*op.grid, op.potential.m22, op.pad, op.phys22);
    double sup = 0.0;
    for (std::size_t i = 0; i < op.phys11.size(); ++i) {
      const double fro = std::sqrt(std::norm(op.phys11[i]) + std::norm(op.phys12[i]) +
                                   std::norm(op.phys21[i]) + std::norm(op.phys22[i]));
      sup = std::max(sup, fro);
    }
    op.potential_sup = sup;
  }
  return op;
}

VectorField apply(const OperatorHandle& op, const VectorField& w) {
  if (w.grid->n() != op.grid->n()) throw std::invalid_argument("operator/grid mismatch");
  VectorField out(w.grid);
  for (const Mode& m : w.grid->retained()) {
    const double f = -0.5 * m.k2n - op.r;
    out.c1[m.idx] = f * w.c1[m.idx];
    out.c2[m.idx] = f * w.c2[m.idx];
  }
  if (!op.potential_zero) {
    std::vector<cplx> v1, v2;
    to_physical(*op.grid, w.c1, op.pad, v1);
    to_physical(*op.grid, w.c2, op.pad, v2);
    for (std::size_t i = 0; i < v1.size(); ++i) {
      const cplx a = op.phys11[i] * v1[i] + op.phys12[i] * v2[i];
      const cplx b = op.phys21[i] * v1[i] + op.phys22[i] * v2[i];
      v1[i] = a;
      v2[i] = b;
    }
    std::vector<cplx> s1, s2;
    to_spectral(*op.grid, v1, op.pad, s1, false);
    to_spectral(*op.grid, v2, op.pad, s2, false);
    for (const Mode& m : w.grid->retained()) {
      out.c1[m.idx] += s1[m.idx];
      out.c2[m.idx] += s2[m.idx];
    }
  }
  return out;
}

double quadratic_form(const OperatorHandle& op, const VectorField& w) {
  if (divergence_residual(w) > 1e-8)
    throw std::invalid_argument("quadratic_form: field is not divergence-free");
  return inner(w, apply(op, w));
}

EigenResult top_eigenvalue(const OperatorHandle& op, double tol, int max_iter) {
  if (tol <= 0.0) throw std::invalid_argument("top_eigenvalue: tol must be positive");
  const double kmax2 = static_cast<double>(op.grid->kmax()) * op.grid->kmax() * 2.0;
  const double shift = 0.5 * kmax2 + op.r + op.potential_sup + 1.0;

  // Deterministic pseudo-random start vector with energy in every mode.
  VectorField v(op.grid);
  for (const Mode& m : op.grid->canonical()) {
    const rng::NormalPair p =
        rng::normal_pair(12345u, rng::kStreamGeneric, op.grid->mode_id(m.k1, m.k2), 0, 7);
    const cplx z(p.z0, p.z1);
    const int neg = op.grid->index_of(-m.k1, -m.k2);
    v.c1[m.idx] = z / std::sqrt(1.0 + m.k2n);
    v.c2[m.idx] = std::conj(z) / (1.0 + m.k2n);
    v.c1[neg] = std::conj(v.c1[m.idx]);
    v.c2[neg] = std::conj(v.c2[m.idx]);
  }
  double nv = l2_norm(v);
  v = (1.0 / nv) * v;

  EigenResult res;
  double rayleigh_prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VectorField av = apply(op, v);
    const double rayleigh = inner(v, av);  // v normalised
    if (it > 0 && std::abs(rayleigh - rayleigh_prev) < tol) {
      res.value = rayleigh;
      res.iterations = it + 1;
      res.converged = true;
      return res;
    }
    rayleigh_prev = rayleigh;
    axpy(shift, v, av);  // (A + s) v
    nv = l2_norm(av);
    if (nv == 0.0) throw std::runtime_error("top_eigenvalue: iterate vanished");
    v = (1.0 / nv) * av;
    res.value = rayleigh;
    res.iterations = it + 1;
  }
  return res;  // not converged; last Rayleigh quotient reported
}

double empirical_m(const OperatorHandle& op, double tol, int max_iter) {
  return top_eigenvalue(op, tol, max_iter).value + 1.0;
}

RemainderNorms paracontrolled_remainder(const VectorField& w, const MatrixField& p, double kappa,
                                        const Paracalc& pc) {
  RemainderNorms out;
  out.base = sobolev_norm(w, 1.0 - kappa);
  const VectorField wp = pc.para_lt_vec_mat(w, p);
  out.remainder = sobolev_norm(w - wp, 2.0 - 2.0 * kappa);
  out.total = out.base + out.remainder;
  return out;
}

}  // namespace sns
