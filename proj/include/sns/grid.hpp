#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace sns {

using cplx = std::complex<double>;

// One spectral lattice site: FFT-order index and integer wavevector.
struct Mode {
  int idx;
  int k1;
  int k2;
  double k2n;  // |k|^2
};

// Wavevector bookkeeping for mean-free periodic fields on the torus.
//
// Coefficients are stored on the full n x n lattice in FFT index order
// (idx = a*n + b, component a <-> k1, with k = a for a < n/2 and a - n
// otherwise).  The zero mode and the Nyquist rows |k_i| = n/2 are
// structurally zero, so the retained set {|k_1|,|k_2| <= n/2 - 1} \ {0}
// is closed under k -> -k and Hermitian pairing is total on it.
class FourierGrid {
 public:
  explicit FourierGrid(int n);

  int n() const { return n_; }
  int kmax() const { return kmax_; }
  int size() const { return n_ * n_; }
  // Largest Euclidean |k| over the retained set.
  double radius() const { return radius_; }

  const std::vector<Mode>& retained() const { return retained_; }
  // One representative per Hermitian pair: k1 > 0, or k1 == 0 and k2 > 0.
  const std::vector<Mode>& canonical() const { return canonical_; }

  int index_of(int k1, int k2) const {
    int a = k1 < 0 ? k1 + n_ : k1;
    int b = k2 < 0 ? k2 + n_ : k2;
    return a * n_ + b;
  }
  bool is_retained(int k1, int k2) const {
    if (k1 == 0 && k2 == 0) return false;
    return std::abs(k1) <= kmax_ && std::abs(k2) <= kmax_;
  }
  // Stable identifier used to key per-mode RNG streams.
  std::uint32_t mode_id(int k1, int k2) const {
    return static_cast<std::uint32_t>((k1 + kmax_) * (2 * kmax_ + 1) + (k2 + kmax_));
  }

 private:
  int n_;
  int kmax_;
  double radius_;
  std::vector<Mode> retained_;
  std::vector<Mode> canonical_;
};

using GridPtr = std::shared_ptr<const FourierGrid>;

// Shared, cached grid instances (grids are immutable).
GridPtr make_grid(int n);

}  // namespace sns
