#pragma once

#include <complex>
#include <vector>

#include "sns/grid.hpp"

namespace sns {

// Mean-free vector field in spectral representation.  Coefficients are kept
// on the full FFT-order lattice; entries outside the retained set (zero mode,
// Nyquist rows) are identically zero.
struct VectorField {
  GridPtr grid;
  std::vector<cplx> c1, c2;
  bool divergence_free = false;

  VectorField() = default;
  explicit VectorField(GridPtr g)
      : grid(std::move(g)), c1(grid->size(), cplx{}), c2(grid->size(), cplx{}) {}

  cplx& at1(int k1, int k2) { return c1[grid->index_of(k1, k2)]; }
  cplx& at2(int k1, int k2) { return c2[grid->index_of(k1, k2)]; }
  const cplx& at1(int k1, int k2) const { return c1[grid->index_of(k1, k2)]; }
  const cplx& at2(int k1, int k2) const { return c2[grid->index_of(k1, k2)]; }
};

// 2x2 matrix field in spectral representation.  Unlike vector fields, matrix
// fields carry the zero mode (products of mean-free fields have means).
struct MatrixField {
  GridPtr grid;
  std::vector<cplx> m11, m12, m21, m22;
  bool symmetric = false;

  MatrixField() = default;
  explicit MatrixField(GridPtr g)
      : grid(std::move(g)),
        m11(grid->size(), cplx{}),
        m12(grid->size(), cplx{}),
        m21(grid->size(), cplx{}),
        m22(grid->size(), cplx{}) {}

  const std::vector<cplx>& entry(int i, int j) const {
    return i == 1 ? (j == 1 ? m11 : m12) : (j == 1 ? m21 : m22);
  }
  std::vector<cplx>& entry(int i, int j) {
    return i == 1 ? (j == 1 ? m11 : m12) : (j == 1 ? m21 : m22);
  }
};

// ----- linear spectral operators ---------------------------------------

// Projection onto divergence-free fields along k-perp.
VectorField leray_project(const VectorField& phi);

// Heat semigroup: coefficients scaled by exp(-|k|^2 s); rejects s < 0.
VectorField heat_propagate(const VectorField& phi, double s);

// (grad_sym phi)_{ij} = (i/2)(k_i phi_j + k_j phi_i); symmetric output.
MatrixField sym_gradient(const VectorField& phi);

// div(M)_j = sum_i d_i M_{ij}.
VectorField divergence(const MatrixField& m);

// Componentwise d-th partial derivative (d is 1 or 2).
VectorField partial_derivative(const VectorField& phi, int d);

VectorField laplacian(const VectorField& phi);

// ----- algebra ----------------------------------------------------------

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
MatrixField operator+(const MatrixField& a, const MatrixField& b);
MatrixField operator-(const MatrixField& a, const MatrixField& b);
MatrixField operator*(double s, const MatrixField& a);
void axpy(double a, const VectorField& x, VectorField& y);  // y += a*x

// ----- norms and pairings ------------------------------------------------

// (sum_k |k|^{2 alpha} |phi_hat(k)|^2)^{1/2} over the retained set.
double sobolev_norm(const VectorField& phi, double alpha);
double sobolev_norm(const MatrixField& m, double alpha);
double l2_norm(const VectorField& phi);
double inner(const VectorField& a, const VectorField& b);

// Largest |coefficient| over all modes; cheap zero/NaN screen.
double max_abs_coeff(const VectorField& phi);
bool is_finite(const VectorField& phi);

// Max relative divergence residual |k.phi_hat| / |phi_hat|.
double divergence_residual(const VectorField& phi);

void enforce_hermitian(VectorField& phi);
void enforce_hermitian(MatrixField& m);

// ----- physical-space evaluation and products ----------------------------

// Padded physical lattice size used for alias-free quadratic products
// (m >= 3*kmax + 1, rounded to an FFT-friendly even size).
int pad_size(const FourierGrid& g, bool dealias);

// Evaluate a spectral scalar slot on the m x m physical lattice.
void to_physical(const FourierGrid& g, const std::vector<cplx>& spec, int m,
                 std::vector<cplx>& phys);
// Analyse an m x m physical array back to the grid's lattice, keeping modes
// with |k_i| <= kmax plus the zero mode (callers drop it for vector fields).
void to_spectral(const FourierGrid& g, std::vector<cplx>& phys, int m,
                 std::vector<cplx>& spec, bool keep_zero_mode);

// a (x)_s b = (a_i b_j + a_j b_i)/2, pseudo-spectral, alias-free when
// dealias is set.
MatrixField symmetric_tensor_product(const VectorField& a, const VectorField& b,
                                     bool dealias = true);

// Pointwise matrix-vector product (M v)_i = sum_j M_{ij} v_j; output is
// mean-free (zero mode dropped).
VectorField matvec_product(const MatrixField& m, const VectorField& v,
                           bool dealias = true);

// <w, div(M)> evaluated spectrally.
double pair_with_divergence(const VectorField& w, const MatrixField& m);

}  // namespace sns
