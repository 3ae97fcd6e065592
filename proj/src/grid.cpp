#include "sns/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace sns {

FourierGrid::FourierGrid(int n) : n_(n) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("grid size must be even and >= 4");
  kmax_ = n / 2 - 1;
  radius_ = std::sqrt(2.0) * kmax_;
  retained_.reserve(static_cast<std::size_t>(2 * kmax_ + 1) * (2 * kmax_ + 1) - 1);
  for (int k1 = -kmax_; k1 <= kmax_; ++k1) {
    for (int k2 = -kmax_; k2 <= kmax_; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      Mode m{index_of(k1, k2), k1, k2, static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2};
      retained_.push_back(m);
      if (k1 > 0 || (k1 == 0 && k2 > 0)) canonical_.push_back(m);
    }
  }
}

GridPtr make_grid(int n) {
  static std::map<int, GridPtr> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto g = std::make_shared<const FourierGrid>(n);
  cache.emplace(n, g);
  return g;
}

}  // namespace sns
