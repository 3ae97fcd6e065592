#include "sns/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sns/fft.hpp"

namespace sns {

namespace {

void check_same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b || a->n() != b->n()) throw std::invalid_argument("grid mismatch");
}

inline double pow_k2(double k2n, double alpha) {
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return k2n;
  if (alpha == -1.0) return 1.0 / k2n;
  return std::pow(k2n, alpha);
}

}  // namespace

VectorField leray_project(const VectorField& phi) {
  VectorField out(phi.grid);
  for (const Mode& m : phi.grid->retained()) {
    const double nk = std::sqrt(m.k2n);
    const double p1 = m.k2 / nk;   // k-perp / |k|
    const double p2 = -m.k1 / nk;
    const cplx dot = phi.c1[m.idx] * p1 + phi.c2[m.idx] * p2;
    out.c1[m.idx] = dot * p1;
    out.c2[m.idx] = dot * p2;
  }
  out.divergence_free = true;
  return out;
}

VectorField heat_propagate(const VectorField& phi, double s) {
  if (s < 0.0) throw std::invalid_argument("heat_propagate: negative time");
  VectorField out(phi.grid);
  out.divergence_free = phi.divergence_free;
  for (const Mode& m : phi.grid->retained()) {
    const double f = std::exp(-m.k2n * s);
    out.c1[m.idx] = phi.c1[m.idx] * f;
    out.c2[m.idx] = phi.c2[m.idx] * f;
  }
  return out;
}

MatrixField sym_gradient(const VectorField& phi) {
  MatrixField out(phi.grid);
  const cplx iu(0.0, 1.0);
  for (const Mode& m : phi.grid->retained()) {
    const cplx g11 = iu * static_cast<double>(m.k1) * phi.c1[m.idx];
    const cplx g22 = iu * static_cast<double>(m.k2) * phi.c2[m.idx];
    const cplx g12 = 0.5 * iu * (static_cast<double>(m.k1) * phi.c2[m.idx] +
                                 static_cast<double>(m.k2) * phi.c1[m.idx]);
    out.m11[m.idx] = g11;
    out.m12[m.idx] = g12;
    out.m21[m.idx] = g12;
    out.m22[m.idx] = g22;
  }
  out.symmetric = true;
  return out;
}

VectorField divergence(const MatrixField& m) {
  VectorField out(m.grid);
  const cplx iu(0.0, 1.0);
  for (const Mode& md : m.grid->retained()) {
    const cplx k1 = iu * static_cast<double>(md.k1);
    const cplx k2 = iu * static_cast<double>(md.k2);
    out.c1[md.idx] = k1 * m.m11[md.idx] + k2 * m.m21[md.idx];
    out.c2[md.idx] = k1 * m.m12[md.idx] + k2 * m.m22[md.idx];
  }
  return out;
}

VectorField partial_derivative(const VectorField& phi, int d) {
  if (d != 1 && d != 2) throw std::invalid_argument("partial_derivative: d must be 1 or 2");
  VectorField out(phi.grid);
  const cplx iu(0.0, 1.0);
  for (const Mode& m : phi.grid->retained()) {
    const cplx f = iu * static_cast<double>(d == 1 ? m.k1 : m.k2);
    out.c1[m.idx] = f * phi.c1[m.idx];
    out.c2[m.idx] = f * phi.c2[m.idx];
  }
  return out;
}

VectorField laplacian(const VectorField& phi) {
  VectorField out(phi.grid);
  out.divergence_free = phi.divergence_free;
  for (const Mode& m : phi.grid->retained()) {
    out.c1[m.idx] = -m.k2n * phi.c1[m.idx];
    out.c2[m.idx] = -m.k2n * phi.c2[m.idx];
  }
  return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  check_same_grid(a.grid, b.grid);
  VectorField out(a.grid);
  out.divergence_free = a.divergence_free && b.divergence_free;
  for (std::size_t i = 0; i < out.c1.size(); ++i) {
    out.c1[i] = a.c1[i] + b.c1[i];
    out.c2[i] = a.c2[i] + b.c2[i];
  }
  return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  check_same_grid(a.grid, b.grid);
  VectorField out(a.grid);
  out.divergence_free = a.divergence_free && b.divergence_free;
  for (std::size_t i = 0; i < out.c1.size(); ++i) {
    out.c1[i] = a.c1[i] - b.c1[i];
    out.c2[i] = a.c2[i] - b.c2[i];
  }
  return out;
}

VectorField operator*(double s, const VectorField& a) {
  VectorField out(a.grid);
  out.divergence_free = a.divergence_free;
  for (std::size_t i = 0; i < out.c1.size(); ++i) {
    out.c1[i] = s * a.c1[i];
    out.c2[i] = s * a.c2[i];
  }
  return out;
}

MatrixField operator+(const MatrixField& a, const MatrixField& b) {
  check_same_grid(a.grid, b.grid);
  MatrixField out(a.grid);
  out.symmetric = a.symmetric && b.symmetric;
  for (std::size_t i = 0; i < out.m11.size(); ++i) {
    out.m11[i] = a.m11[i] + b.m11[i];
    out.m12[i] = a.m12[i] + b.m12[i];
    out.m21[i] = a.m21[i] + b.m21[i];
    out.m22[i] = a.m22[i] + b.m22[i];
  }
  return out;
}

MatrixField operator-(const MatrixField& a, const MatrixField& b) {
  check_same_grid(a.grid, b.grid);
  MatrixField out(a.grid);
  out.symmetric = a.symmetric && b.symmetric;
  for (std::size_t i = 0; i < out.m11.size(); ++i) {
    out.m11[i] = a.m11[i] - b.m11[i];
    out.m12[i] = a.m12[i] - b.m12[i];
    out.m21[i] = a.m21[i] - b.m21[i];
    out.m22[i] = a.m22[i] - b.m22[i];
  }
  return out;
}

MatrixField operator*(double s, const MatrixField& a) {
  MatrixField out(a.grid);
  out.symmetric = a.symmetric;
  for (std::size_t i = 0; i < out.m11.size(); ++i) {
    out.m11[i] = s * a.m11[i];
    out.m12[i] = s * a.m12[i];
    out.m21[i] = s * a.m21[i];
    out.m22[i] = s * a.m22[i];
  }
  return out;
}

void axpy(double a, const VectorField& x, VectorField& y) {
  check_same_grid(x.grid, y.grid);
  for (std::size_t i = 0; i < y.c1.size(); ++i) {
    y.c1[i] += a * x.c1[i];
    y.c2[i] += a * x.c2[i];
  }
  y.divergence_free = y.divergence_free && x.divergence_free;
}

double sobolev_norm(const VectorField& phi, double alpha) {
  double s = 0.0;
  for (const Mode& m : phi.grid->retained()) {
    const double w = pow_k2(m.k2n, alpha);
    s += w * (std::norm(phi.c1[m.idx]) + std::norm(phi.c2[m.idx]));
  }
  return std::sqrt(s);
}

double sobolev_norm(const MatrixField& m, double alpha) {
  double s = 0.0;
  for (const Mode& md : m.grid->retained()) {
    const double w = pow_k2(md.k2n, alpha);
    s += w * (std::norm(m.m11[md.idx]) + std::norm(m.m12[md.idx]) +
              std::norm(m.m21[md.idx]) + std::norm(m.m22[md.idx]));
  }
  if (alpha == 0.0) {
    const int z = m.grid->index_of(0, 0);
    s += std::norm(m.m11[z]) + std::norm(m.m12[z]) + std::norm(m.m21[z]) + std::norm(m.m22[z]);
  }
  return std::sqrt(s);
}

double l2_norm(const VectorField& phi) { return sobolev_norm(phi, 0.0); }

double inner(const VectorField& a, const VectorField& b) {
  check_same_grid(a.grid, b.grid);
  double s = 0.0;
  for (const Mode& m : a.grid->retained()) {
    s += (std::conj(a.c1[m.idx]) * b.c1[m.idx] + std::conj(a.c2[m.idx]) * b.c2[m.idx]).real();
  }
  return s;
}

double max_abs_coeff(const VectorField& phi) {
  double s = 0.0;
  for (const Mode& m : phi.grid->retained()) {
    s = std::max(s, std::abs(phi.c1[m.idx]));
    s = std::max(s, std::abs(phi.c2[m.idx]));
  }
  return s;
}

bool is_finite(const VectorField& phi) {
  for (const Mode& m : phi.grid->retained()) {
    const cplx& a = phi.c1[m.idx];
    const cplx& b = phi.c2[m.idx];
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(b.real()) ||
        !std::isfinite(b.imag()))
      return false;
  }
  return true;
}

double divergence_residual(const VectorField& phi) {
  double worst = 0.0;
  for (const Mode& m : phi.grid->retained()) {
    const double mag =
        std::sqrt(std::norm(phi.c1[m.idx]) + std::norm(phi.c2[m.idx]));
    if (mag == 0.0) continue;
    const cplx dot = static_cast<double>(m.k1) * phi.c1[m.idx] +
                     static_cast<double>(m.k2) * phi.c2[m.idx];
    worst = std::max(worst, std::abs(dot) / (std::sqrt(m.k2n) * mag));
  }
  return worst;
}

void enforce_hermitian(VectorField& phi) {
  for (const Mode& m : phi.grid->canonical()) {
    const int neg = phi.grid->index_of(-m.k1, -m.k2);
    cplx a = 0.5 * (phi.c1[m.idx] + std::conj(phi.c1[neg]));
    cplx b = 0.5 * (phi.c2[m.idx] + std::conj(phi.c2[neg]));
    phi.c1[m.idx] = a;
    phi.c1[neg] = std::conj(a);
    phi.c2[m.idx] = b;
    phi.c2[neg] = std::conj(b);
  }
}

void enforce_hermitian(MatrixField& m) {
  for (const Mode& md : m.grid->canonical()) {
    const int neg = m.grid->index_of(-md.k1, -md.k2);
    for (int i = 1; i <= 2; ++i) {
      for (int j = 1; j <= 2; ++j) {
        auto& e = m.entry(i, j);
        cplx a = 0.5 * (e[md.idx] + std::conj(e[neg]));
        e[md.idx] = a;
        e[neg] = std::conj(a);
      }
    }
  }
  const int z = m.grid->index_of(0, 0);
  m.m11[z] = cplx(m.m11[z].real(), 0.0);
  m.m12[z] = cplx(m.m12[z].real(), 0.0);
  m.m21[z] = cplx(m.m21[z].real(), 0.0);
  m.m22[z] = cplx(m.m22[z].real(), 0.0);
}

int pad_size(const FourierGrid& g, bool dealias) {
  if (!dealias) return g.n();
  return fft::good_size(3 * g.kmax() + 1);
}

void to_physical(const FourierGrid& g, const std::vector<cplx>& spec, int m,
                 std::vector<cplx>& phys) {
  phys.assign(static_cast<std::size_t>(m) * m, cplx{});
  const int n = g.n();
  const int kmax = g.kmax();
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    const int a_src = (k1 < 0 ? k1 + n : k1);
    const int a_dst = (k1 < 0 ? k1 + m : k1);
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      const int b_src = (k2 < 0 ? k2 + n : k2);
      const int b_dst = (k2 < 0 ? k2 + m : k2);
      phys[static_cast<std::size_t>(a_dst) * m + b_dst] =
          spec[static_cast<std::size_t>(a_src) * n + b_src];
    }
  }
  fft::backward(m, phys.data());
}

void to_spectral(const FourierGrid& g, std::vector<cplx>& phys, int m,
                 std::vector<cplx>& spec, bool keep_zero_mode) {
  fft::forward(m, phys.data());
  const int n = g.n();
  const int kmax = g.kmax();
  spec.assign(static_cast<std::size_t>(n) * n, cplx{});
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    const int a_src = (k1 < 0 ? k1 + m : k1);
    const int a_dst = (k1 < 0 ? k1 + n : k1);
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (!keep_zero_mode && k1 == 0 && k2 == 0) continue;
      const int b_src = (k2 < 0 ? k2 + m : k2);
      const int b_dst = (k2 < 0 ? k2 + n : k2);
      spec[static_cast<std::size_t>(a_dst) * n + b_dst] =
          phys[static_cast<std::size_t>(a_src) * m + b_src];
    }
  }
}

MatrixField symmetric_tensor_product(const VectorField& a, const VectorField& b,
                                     bool dealias) {
  check_same_grid(a.grid, b.grid);
  const FourierGrid& g = *a.grid;
  const int m = pad_size(g, dealias);
  thread_local std::vector<cplx> a1, a2, b1, b2, p11, p12, p22;
  to_physical(g, a.c1, m, a1);
  to_physical(g, a.c2, m, a2);
  to_physical(g, b.c1, m, b1);
  to_physical(g, b.c2, m, b2);
  const std::size_t total = static_cast<std::size_t>(m) * m;
  p11.resize(total);
  p12.resize(total);
  p22.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    p11[i] = a1[i] * b1[i];
    p22[i] = a2[i] * b2[i];
    p12[i] = 0.5 * (a1[i] * b2[i] + a2[i] * b1[i]);
  }
  MatrixField out(a.grid);
  to_spectral(g, p11, m, out.m11, true);
  to_spectral(g, p12, m, out.m12, true);
  to_spectral(g, p22, m, out.m22, true);
  out.m21 = out.m12;
  out.symmetric = true;
  return out;
}

VectorField matvec_product(const MatrixField& mat, const VectorField& v, bool dealias) {
  check_same_grid(mat.grid, v.grid);
  const FourierGrid& g = *mat.grid;
  const int m = pad_size(g, dealias);
  thread_local std::vector<cplx> m11, m12, m21, m22, v1, v2;
  to_physical(g, mat.m11, m, m11);
  to_physical(g, mat.m12, m, m12);
  to_physical(g, mat.m21, m, m21);
  to_physical(g, mat.m22, m, m22);
  to_physical(g, v.c1, m, v1);
  to_physical(g, v.c2, m, v2);
  const std::size_t total = static_cast<std::size_t>(m) * m;
  for (std::size_t i = 0; i < total; ++i) {
    const cplx o1 = m11[i] * v1[i] + m12[i] * v2[i];
    const cplx o2 = m21[i] * v1[i] + m22[i] * v2[i];
    v1[i] = o1;
    v2[i] = o2;
  }
  VectorField out(v.grid);
  to_spectral(g, v1, m, out.c1, false);
  to_spectral(g, v2, m, out.c2, false);
  return out;
}

double pair_with_divergence(const VectorField& w, const MatrixField& m) {
  check_same_grid(w.grid, m.grid);
  const cplx iu(0.0, 1.0);
  double s = 0.0;
  for (const Mode& md : w.grid->retained()) {
    const cplx k1 = iu * static_cast<double>(md.k1);
    const cplx k2 = iu * static_cast<double>(md.k2);
    const cplx d1 = k1 * m.m11[md.idx] + k2 * m.m21[md.idx];
    const cplx d2 = k1 * m.m12[md.idx] + k2 * m.m22[md.idx];
    s += (std::conj(w.c1[md.idx]) * d1 + std::conj(w.c2[md.idx]) * d2).real();
  }
  return s;
}

}  // namespace sns
