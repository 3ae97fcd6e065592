#include "sns/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace sns {
namespace fft {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;
std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

// In-place plans with FFTW_ESTIMATE are input-independent, so a single plan
// per size can be executed on any aligned buffer via the new-array interface.
PlanPair& plans_for(int m) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  PlanPair p;
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(m) * m);
  if (!buf) throw std::bad_alloc();
  p.fwd = fftw_plan_dft_2d(m, m, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_2d(m, m, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
  return cache.emplace(m, p).first->second;
}

}  // namespace

void forward(int m, std::complex<double>* data) {
  PlanPair& p = plans_for(m);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p.fwd, raw, raw);
  const double scale = 1.0 / (static_cast<double>(m) * m);
  const std::size_t total = static_cast<std::size_t>(m) * m;
  for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
}

void backward(int m, std::complex<double>* data) {
  PlanPair& p = plans_for(m);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p.bwd, raw, raw);
}

int good_size(int target) {
  auto smooth = [](int v) {
    for (int f : {2, 3, 5}) {
      while (v % f == 0) v /= f;
    }
    return v == 1;
  };
  int m = target;
  if (m % 2 != 0) ++m;
  while (!smooth(m)) m += 2;
  return m;
}

}  // namespace fft
}  // namespace sns
