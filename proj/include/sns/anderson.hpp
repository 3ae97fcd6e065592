#pragma once

#include "sns/field.hpp"
#include "sns/noise.hpp"
#include "sns/paracalc.hpp"

namespace sns {

// Renormalised Anderson-type operator  (1/2) Lap + 2 grad_sym L_lambda X - r Id,
// held as a matrix-free action.  Handles are immutable; apply is re-entrant.
struct OperatorHandle {
  GridPtr grid;
  double lambda = 1.0;
  double r = 0.0;
  MatrixField potential;        // 2 grad_sym L_lambda X
  double potential_sup = 0.0;   // max pointwise Frobenius norm (physical grid)
  bool potential_zero = true;
  bool dealias = true;
  // Physical-space potential on the padded lattice, cached once so the
  // matrix-free apply costs two transforms each way.
  int pad = 0;
  std::vector<cplx> phys11, phys12, phys21, phys22;
};

OperatorHandle make_operator(const VectorField& x, double lambda, double r, const Paracalc& pc);

// (1/2) Lap w + potential.w - r w, matrix-vector product dealiased.
VectorField apply(const OperatorHandle& op, const VectorField& w);

// <w, A w>; requires w divergence-free.
double quadratic_form(const OperatorHandle& op, const VectorField& w);

struct EigenResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest eigenvalue via shifted power iteration on A + s Id.  The shift
// s = (1/2) kmax^2 + r + |potential|_inf makes the top of the spectrum the
// dominant mode of the shifted operator (the bare Laplacian bottom would
// otherwise dominate).  Converged when successive Rayleigh quotients differ
// by less than tol.
EigenResult top_eigenvalue(const OperatorHandle& op, double tol = 1e-10, int max_iter = 20000);

// Empirical spectral bound: top eigenvalue plus one.
double empirical_m(const OperatorHandle& op, double tol = 1e-8, int max_iter = 20000);

struct RemainderNorms {
  double base = 0.0;       // |w|_{H^{1-kappa}}
  double remainder = 0.0;  // |w - w =< P|_{H^{2-2kappa}}
  double total = 0.0;
};

// Paracontrolled-remainder norms against a reference P.
RemainderNorms paracontrolled_remainder(const VectorField& w, const MatrixField& p, double kappa,
                                        const Paracalc& pc);

}  // namespace sns
