#include "sns/paracalc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sns {

double CutoffPair::smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double CutoffPair::h(double r) const { return smoothstep(2.0 * r - 1.0); }

DyadicPartition::DyadicPartition(const FourierGrid& grid) {
  // Smallest J with chi(radius / 2^{J+1}) == 1, so the telescoping partition
  // sums to exactly one on every retained mode.
  int j = 0;
  while (grid.radius() / std::exp2(j) > 1.5) ++j;
  jmax_ = j;
}

double DyadicPartition::chi(double r) {
  if (r <= 0.75) return 1.0;
  if (r >= 4.0 / 3.0) return 0.0;
  return 1.0 - CutoffPair::smoothstep((r - 0.75) / (4.0 / 3.0 - 0.75));
}

double DyadicPartition::rho(int j, double r) const {
  if (j == -1) return chi(r);
  return chi(r / std::exp2(j + 1)) - chi(r / std::exp2(j));
}

Paracalc::Paracalc(GridPtr grid, bool dealias)
    : grid_(std::move(grid)), part_(*grid_), dealias_(dealias), pad_(pad_size(*grid_, dealias)) {
  rho_table_.assign(part_.jmax() + 2, std::vector<double>(grid_->size(), 0.0));
  for (const Mode& m : grid_->retained()) {
    const double r = std::sqrt(m.k2n);
    for (int j = -1; j <= part_.jmax(); ++j) rho_table_[j + 1][m.idx] = part_.rho(j, r);
  }
  // The zero mode sits in block -1 (chi(0) = 1); relevant for matrix fields.
  rho_table_[0][grid_->index_of(0, 0)] = 1.0;
}

VectorField Paracalc::paley_block(const VectorField& phi, int j) const {
  if (j < -1 || j > part_.jmax()) throw std::invalid_argument("paley_block: index out of range");
  VectorField out(phi.grid);
  out.divergence_free = phi.divergence_free;
  const std::vector<double>& w = rho_table_[j + 1];
  for (const Mode& m : grid_->retained()) {
    out.c1[m.idx] = w[m.idx] * phi.c1[m.idx];
    out.c2[m.idx] = w[m.idx] * phi.c2[m.idx];
  }
  return out;
}

namespace {

void validate_pq(int p, int q) {
  if (p != 1 && p != 2 && p != 4 && p != kLpInf)
    throw std::invalid_argument("besov_norm: unsupported integrability p");
  if (q != 2 && q != kLpInf) throw std::invalid_argument("besov_norm: unsupported summability q");
}

// L^p norm (unit-mass measure) of a list of physical component arrays.
double lp_norm(const std::vector<const std::vector<cplx>*>& comps, int m, int p) {
  const std::size_t total = static_cast<std::size_t>(m) * m;
  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    double mag2 = 0.0;
    for (const auto* c : comps) mag2 += std::norm((*c)[i]);
    const double mag = std::sqrt(mag2);
    if (p == kLpInf) {
      acc = std::max(acc, mag);
    } else if (p == 2) {
      acc += mag2;
    } else if (p == 1) {
      acc += mag;
    } else {
      acc += mag2 * mag2;
    }
  }
  if (p == kLpInf) return acc;
  const double mean = acc / static_cast<double>(total);
  if (p == 2) return std::sqrt(mean);
  if (p == 1) return mean;
  return std::sqrt(std::sqrt(mean));
}

}  // namespace

double Paracalc::besov_norm(const VectorField& phi, double alpha, int p, int q) const {
  validate_pq(p, q);
  double acc = 0.0;
  thread_local std::vector<cplx> b1, b2, s1, s2;
  s1.resize(grid_->size());
  s2.resize(grid_->size());
  for (int j = -1; j <= part_.jmax(); ++j) {
    const std::vector<double>& w = rho_table_[j + 1];
    for (int i = 0; i < grid_->size(); ++i) {
      s1[i] = w[i] * phi.c1[i];
      s2[i] = w[i] * phi.c2[i];
    }
    to_physical(*grid_, s1, pad_, b1);
    to_physical(*grid_, s2, pad_, b2);
    const double lp = lp_norm({&b1, &b2}, pad_, p);
    const double term = std::exp2(j * alpha) * lp;
    if (q == kLpInf) {
      acc = std::max(acc, term);
    } else {
      acc += term * term;
    }
  }
  return q == kLpInf ? acc : std::sqrt(acc);
}

double Paracalc::besov_norm(const MatrixField& m, double alpha, int p, int q) const {
  validate_pq(p, q);
  double acc = 0.0;
  thread_local std::vector<cplx> b11, b12, b21, b22, s;
  s.resize(grid_->size());
  std::vector<std::vector<cplx>*> phys = {&b11, &b12, &b21, &b22};
  const std::vector<cplx>* entries[4] = {&m.m11, &m.m12, &m.m21, &m.m22};
  for (int j = -1; j <= part_.jmax(); ++j) {
    const std::vector<double>& w = rho_table_[j + 1];
    for (int e = 0; e < 4; ++e) {
      for (int i = 0; i < grid_->size(); ++i) s[i] = w[i] * (*entries[e])[i];
      to_physical(*grid_, s, pad_, *phys[e]);
    }
    const double lp = lp_norm({&b11, &b12, &b21, &b22}, pad_, p);
    const double term = std::exp2(j * alpha) * lp;
    if (q == kLpInf) {
      acc = std::max(acc, term);
    } else {
      acc += term * term;
    }
  }
  return q == kLpInf ? acc : std::sqrt(acc);
}

// Physical-space Paley blocks for a set of scalar slots, plus running
// low-frequency partial sums S_{c-1} = sum_{d <= c-2} Delta_d.
struct Paracalc::Blocks {
  int m = 0;
  int nblocks = 0;                                   // indices -1 .. jmax
  std::vector<std::vector<std::vector<cplx>>> blk;   // [slot][j+1][site]
};

void Paracalc::make_blocks(const std::vector<const std::vector<cplx>*>& slots,
                           Blocks& out) const {
  out.m = pad_;
  out.nblocks = part_.jmax() + 2;
  out.blk.resize(slots.size());
  thread_local std::vector<cplx> s;
  s.resize(grid_->size());
  for (std::size_t sl = 0; sl < slots.size(); ++sl) {
    out.blk[sl].resize(out.nblocks);
    for (int j = -1; j <= part_.jmax(); ++j) {
      const std::vector<double>& w = rho_table_[j + 1];
      for (int i = 0; i < grid_->size(); ++i) s[i] = w[i] * (*slots[sl])[i];
      to_physical(*grid_, s, pad_, out.blk[sl][j + 1]);
    }
  }
}

namespace {

// acc_{11,12,22} += sym tensor product of component pairs (a1,a2) x (b1,b2).
inline void accumulate_sym(const std::vector<cplx>& a1, const std::vector<cplx>& a2,
                           const std::vector<cplx>& b1, const std::vector<cplx>& b2,
                           std::vector<cplx>& acc11, std::vector<cplx>& acc12,
                           std::vector<cplx>& acc22) {
  const std::size_t total = acc11.size();
  for (std::size_t i = 0; i < total; ++i) {
    acc11[i] += a1[i] * b1[i];
    acc22[i] += a2[i] * b2[i];
    acc12[i] += 0.5 * (a1[i] * b2[i] + a2[i] * b1[i]);
  }
}

}  // namespace

MatrixField Paracalc::para_lt(const VectorField& lo, const VectorField& hi) const {
  if (lo.grid->n() != grid_->n() || hi.grid->n() != grid_->n())
    throw std::invalid_argument("grid mismatch");
  thread_local Blocks bl;
  make_blocks({&lo.c1, &lo.c2, &hi.c1, &hi.c2}, bl);
  const std::size_t total = static_cast<std::size_t>(bl.m) * bl.m;
  thread_local std::vector<cplx> acc11, acc12, acc22, s1, s2;
  acc11.assign(total, cplx{});
  acc12.assign(total, cplx{});
  acc22.assign(total, cplx{});
  s1.assign(total, cplx{});  // running S_{c-1} of lo
  s2.assign(total, cplx{});
  for (int c = -1; c <= part_.jmax(); ++c) {
    if (c - 2 >= -1) {
      const auto& d1 = bl.blk[0][c - 2 + 1];
      const auto& d2 = bl.blk[1][c - 2 + 1];
      for (std::size_t i = 0; i < total; ++i) {
        s1[i] += d1[i];
        s2[i] += d2[i];
      }
    }
    if (c >= 1) accumulate_sym(s1, s2, bl.blk[2][c + 1], bl.blk[3][c + 1], acc11, acc12, acc22);
  }
  MatrixField out(grid_);
  to_spectral(*grid_, acc11, bl.m, out.m11, true);
  to_spectral(*grid_, acc12, bl.m, out.m12, true);
  to_spectral(*grid_, acc22, bl.m, out.m22, true);
  out.m21 = out.m12;
  out.symmetric = true;
  return out;
}

MatrixField Paracalc::resonant(const VectorField& a, const VectorField& b) const {
  if (a.grid->n() != grid_->n() || b.grid->n() != grid_->n())
    throw std::invalid_argument("grid mismatch");
  thread_local Blocks bl;
  make_blocks({&a.c1, &a.c2, &b.c1, &b.c2}, bl);
  const std::size_t total = static_cast<std::size_t>(bl.m) * bl.m;
  thread_local std::vector<cplx> acc11, acc12, acc22;
  acc11.assign(total, cplx{});
  acc12.assign(total, cplx{});
  acc22.assign(total, cplx{});
  for (int c = -1; c <= part_.jmax(); ++c) {
    for (int d = std::max(-1, c - 1); d <= std::min(part_.jmax(), c + 1); ++d) {
      accumulate_sym(bl.blk[0][c + 1], bl.blk[1][c + 1], bl.blk[2][d + 1], bl.blk[3][d + 1],
                     acc11, acc12, acc22);
    }
  }
  MatrixField out(grid_);
  to_spectral(*grid_, acc11, bl.m, out.m11, true);
  to_spectral(*grid_, acc12, bl.m, out.m12, true);
  to_spectral(*grid_, acc22, bl.m, out.m22, true);
  out.m21 = out.m12;
  out.symmetric = true;
  return out;
}

MatrixField Paracalc::para_gt(const VectorField& hi, const VectorField& lo) const {
  // The symmetric tensor product makes the high-low paraproduct the mirror
  // image of the low-high one.
  return para_lt(lo, hi);
}

MatrixField Paracalc::resonant_matmat(const MatrixField& a, const MatrixField& b) const {
  if (a.grid->n() != grid_->n() || b.grid->n() != grid_->n())
    throw std::invalid_argument("grid mismatch");
  thread_local Blocks bl;
  make_blocks({&a.m11, &a.m12, &a.m21, &a.m22, &b.m11, &b.m12, &b.m21, &b.m22}, bl);
  const std::size_t total = static_cast<std::size_t>(bl.m) * bl.m;
  MatrixField out(grid_);
  thread_local std::vector<cplx> acc;
  acc.resize(total);
  auto a_slot = [&](int i, int l) -> int { return (i - 1) * 2 + (l - 1); };
  auto b_slot = [&](int l, int j) -> int { return 4 + (l - 1) * 2 + (j - 1); };
  for (int i = 1; i <= 2; ++i) {
    for (int j = 1; j <= 2; ++j) {
      std::fill(acc.begin(), acc.end(), cplx{});
      for (int l = 1; l <= 2; ++l) {
        const auto& ma = bl.blk[a_slot(i, l)];
        const auto& mb = bl.blk[b_slot(l, j)];
        for (int c = -1; c <= part_.jmax(); ++c) {
          for (int d = std::max(-1, c - 1); d <= std::min(part_.jmax(), c + 1); ++d) {
            const auto& xa = ma[c + 1];
            const auto& xb = mb[d + 1];
            for (std::size_t t = 0; t < total; ++t) acc[t] += xa[t] * xb[t];
          }
        }
      }
      to_spectral(*grid_, acc, bl.m, out.entry(i, j), true);
    }
  }
  return out;
}

VectorField Paracalc::para_lt_vec_mat(const VectorField& phi, const MatrixField& m) const {
  if (phi.grid->n() != grid_->n() || m.grid->n() != grid_->n())
    throw std::invalid_argument("grid mismatch");
  thread_local Blocks bl;
  make_blocks({&phi.c1, &phi.c2, &m.m11, &m.m12, &m.m21, &m.m22}, bl);
  const std::size_t total = static_cast<std::size_t>(bl.m) * bl.m;
  thread_local std::vector<cplx> acc1, acc2, s1, s2;
  acc1.assign(total, cplx{});
  acc2.assign(total, cplx{});
  s1.assign(total, cplx{});
  s2.assign(total, cplx{});
  for (int c = -1; c <= part_.jmax(); ++c) {
    if (c - 2 >= -1) {
      const auto& d1 = bl.blk[0][c - 2 + 1];
      const auto& d2 = bl.blk[1][c - 2 + 1];
      for (std::size_t i = 0; i < total; ++i) {
        s1[i] += d1[i];
        s2[i] += d2[i];
      }
    }
    if (c >= 1) {
      const auto& m11 = bl.blk[2][c + 1];
      const auto& m12 = bl.blk[3][c + 1];
      const auto& m21 = bl.blk[4][c + 1];
      const auto& m22 = bl.blk[5][c + 1];
      for (std::size_t i = 0; i < total; ++i) {
        // (phi =< M)_i = sum_j phi_j =< M_{ji}
        acc1[i] += s1[i] * m11[i] + s2[i] * m21[i];
        acc2[i] += s1[i] * m12[i] + s2[i] * m22[i];
      }
    }
  }
  VectorField out(grid_);
  to_spectral(*grid_, acc1, bl.m, out.c1, false);
  to_spectral(*grid_, acc2, bl.m, out.c2, false);
  return out;
}

VectorField Paracalc::lowpass(const VectorField& phi, double lambda) const {
  if (lambda < 1.0) throw std::invalid_argument("lowpass: lambda must be >= 1");
  VectorField out(phi.grid);
  out.divergence_free = phi.divergence_free;
  for (const Mode& m : grid_->retained()) {
    const double w = cut_.l(std::sqrt(m.k2n) / lambda);
    out.c1[m.idx] = w * phi.c1[m.idx];
    out.c2[m.idx] = w * phi.c2[m.idx];
  }
  return out;
}

VectorField Paracalc::highpass(const VectorField& phi, double lambda) const {
  if (lambda < 1.0) throw std::invalid_argument("highpass: lambda must be >= 1");
  VectorField out(phi.grid);
  out.divergence_free = phi.divergence_free;
  for (const Mode& m : grid_->retained()) {
    const double w = cut_.h(std::sqrt(m.k2n) / lambda);
    out.c1[m.idx] = w * phi.c1[m.idx];
    out.c2[m.idx] = w * phi.c2[m.idx];
  }
  return out;
}

MatrixField Paracalc::heat_commutator(const VectorField& f_dot, const VectorField& f,
                                      const VectorField& g) const {
  const VectorField heat_f = f_dot - laplacian(f);
  MatrixField out = para_lt(heat_f, g);
  for (int d = 1; d <= 2; ++d) {
    const MatrixField cross = para_lt(partial_derivative(f, d), partial_derivative(g, d));
    out = out - 2.0 * cross;
  }
  out.symmetric = true;
  return out;
}

MatrixField Paracalc::heat_commutator_slices(const VectorField& f0, const VectorField& f1,
                                             double delta, const VectorField& g) const {
  if (delta <= 0.0) throw std::invalid_argument("heat_commutator: step must be positive");
  const VectorField f_dot = (1.0 / delta) * (f1 - f0);
  return heat_commutator(f_dot, f0, g);
}

MatrixField Paracalc::heat_commutator_defining(const VectorField& f0, const VectorField& f1,
                                               const VectorField& g0, const VectorField& g1,
                                               double delta) const {
  if (delta <= 0.0) throw std::invalid_argument("heat_commutator: step must be positive");
  const MatrixField pg0 = para_lt(f0, g0);
  const MatrixField pg1 = para_lt(f1, g1);
  MatrixField dt_part = (1.0 / delta) * (pg1 - pg0);
  // Laplacian of the matrix paraproduct, entrywise.
  MatrixField lap(grid_);
  for (const Mode& m : grid_->retained()) {
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) lap.entry(i, j)[m.idx] = -m.k2n * pg0.entry(i, j)[m.idx];
  }
  const VectorField g_heat = (1.0 / delta) * (g1 - g0) - laplacian(g0);
  const MatrixField fg = para_lt(f0, g_heat);
  return dt_part - lap - fg;
}

void Paracalc::export_profiles_csv(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open profile csv: " + path);
  os << "r";
  for (int j = -1; j <= part_.jmax(); ++j) os << ",rho_" << j;
  os << ",h,l,partition_sum\n";
  const double rmax = grid_->radius();
  const int samples = 512;
  char buf[64];
  for (int s = 0; s <= samples; ++s) {
    const double r = rmax * s / samples;
    std::snprintf(buf, sizeof buf, "%.12g", r);
    os << buf;
    double sum = 0.0;
    for (int j = -1; j <= part_.jmax(); ++j) {
      const double v = part_.rho(j, r);
      sum += v;
      std::snprintf(buf, sizeof buf, "%.12g", v);
      os << "," << buf;
    }
    std::snprintf(buf, sizeof buf, "%.12g", cut_.h(r / std::max(1.0, rmax / 2)));
    os << "," << buf;
    std::snprintf(buf, sizeof buf, "%.12g", cut_.l(r / std::max(1.0, rmax / 2)));
    os << "," << buf;
    std::snprintf(buf, sizeof buf, "%.12g", sum);
    os << "," << buf << "\n";
  }
}

}  // namespace sns
