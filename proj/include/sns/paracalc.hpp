#pragma once

#include <string>
#include <vector>

#include "sns/field.hpp"

namespace sns {

// Smooth radial cutoff pair: h == 0 on [0,1/2], h == 1 on [1,inf), quintic
// smoothstep in between; l = 1 - h.
struct CutoffPair {
  static double smoothstep(double u);
  double h(double r) const;
  double l(double r) const { return 1.0 - h(r); }
};

// Dyadic partition of unity built from a radial bump chi with chi == 1 on
// [0, 3/4] and chi == 0 on [4/3, inf):
//   rho_{-1} = chi,   rho_j(r) = chi(r/2^{j+1}) - chi(r/2^j)  (j >= 0),
// so blocks j >= 0 live in the annulus 2^j [3/4, 8/3] and the telescoping
// sum is exactly 1 up to radius 1.5 * 2^{jmax}.
class DyadicPartition {
 public:
  explicit DyadicPartition(const FourierGrid& grid);
  int jmax() const { return jmax_; }
  static double chi(double r);
  double rho(int j, double r) const;

 private:
  int jmax_;
};

// Littlewood-Paley calculus over one grid: Paley blocks, Besov norms, the
// Bony trichotomy, smooth frequency cutoffs, and the heat-paraproduct
// commutator.  Stateless apart from the immutable partition, so instances
// can be shared across threads.
class Paracalc {
 public:
  explicit Paracalc(GridPtr grid, bool dealias = true);

  const FourierGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  const DyadicPartition& partition() const { return part_; }
  const CutoffPair& cutoff() const { return cut_; }
  bool dealias() const { return dealias_; }
  int jmax() const { return part_.jmax(); }

  // Fourier multiplier by rho_j; j must lie in [-1, jmax].
  VectorField paley_block(const VectorField& phi, int j) const;

  // Besov norm B^alpha_{p,q}; p in {1,2,4,inf (p<=0)}, q in {2, inf (q<=0)}.
  // Block L^p norms are evaluated on the dealiased physical lattice.
  double besov_norm(const VectorField& phi, double alpha, int p, int q) const;
  double besov_norm(const MatrixField& m, double alpha, int p, int q) const;

  // Bony decomposition of the symmetric tensor product of two vector fields:
  // para_lt pairs low blocks of the first factor (up to two below) with each
  // block of the second, resonant takes |i-j| <= 1, and para_gt(a,b) =
  // para_lt(b,a).  The three parts sum exactly to a (x)_s b.
  MatrixField para_lt(const VectorField& lo, const VectorField& hi) const;
  MatrixField resonant(const VectorField& a, const VectorField& b) const;
  MatrixField para_gt(const VectorField& hi, const VectorField& lo) const;

  // Matrix-matrix resonant product with inner-index contraction:
  // (M o N)_{ij} = sum_l M_{il} o N_{lj}.
  MatrixField resonant_matmat(const MatrixField& a, const MatrixField& b) const;

  // (phi =< M)_i = sum_j phi_j =< M_{ji}; output is mean-free.
  VectorField para_lt_vec_mat(const VectorField& phi, const MatrixField& m) const;

  // Smooth frequency split at scale lambda >= 1: multipliers l(|k|/lambda)
  // and h(|k|/lambda); lowpass + highpass is the identity per mode.
  VectorField lowpass(const VectorField& phi, double lambda) const;
  VectorField highpass(const VectorField& phi, double lambda) const;

  // Heat commutator via the exact Leibniz expansion
  //   (f_dot - Lap f) =< g - 2 sum_d (d_d f) =< (d_d g),
  // with f_dot supplied by the caller (typically a time difference).
  MatrixField heat_commutator(const VectorField& f_dot, const VectorField& f,
                              const VectorField& g) const;
  // Convenience form over two slices of f; f_dot = (f1 - f0)/delta, spatial
  // terms evaluated on f0.
  MatrixField heat_commutator_slices(const VectorField& f0, const VectorField& f1,
                                     double delta, const VectorField& g) const;
  // Defining expression (d_t - Lap)(f =< g) - f =< (d_t - Lap)g with the time
  // derivatives realised as slice differences; agrees with the Leibniz
  // expansion to discretisation order (exactly for time-constant slices).
  MatrixField heat_commutator_defining(const VectorField& f0, const VectorField& f1,
                                       const VectorField& g0, const VectorField& g1,
                                       double delta) const;

  // Audit export: partition and cutoff profiles sampled in |k|.
  void export_profiles_csv(const std::string& path) const;

 private:
  GridPtr grid_;
  DyadicPartition part_;
  CutoffPair cut_;
  bool dealias_;
  int pad_;
  // rho_j sampled on the lattice, per block, FFT index order.
  std::vector<std::vector<double>> rho_table_;

  struct Blocks;  // physical-space Paley blocks of a set of scalar slots
  void make_blocks(const std::vector<const std::vector<cplx>*>& slots, Blocks& out) const;
};

inline constexpr int kLpInf = 0;  // marker for p = infinity / q = infinity

}  // namespace sns
