#include "sns/galerkin.hpp"

#include <cmath>
#include <stdexcept>

namespace sns {

LevelRecord run_level(const SolverConfig& base, double level) {
  if (level < 1.0) throw std::invalid_argument("run_level: level must be >= 1");
  SolverConfig cfg = base;
  cfg.moll_level = level;
  cfg.store_fields = true;
  LevelRecord rec;
  rec.level = level;
  rec.result = run(cfg);
  double prev_t = 0.0;
  for (const TrajectoryRow& row : rec.result.rows) {
    rec.sup_wl_sq = std::max(rec.sup_wl_sq, row.norm_wL * row.norm_wL);
    const double dt_seg = row.t - prev_t;
    rec.h1_integral += dt_seg * row.norm_wL_H1 * row.norm_wL_H1;
    prev_t = row.t;
  }
  return rec;
}

namespace {

double sobolev_distance(const VectorField& a, const VectorField& b, double beta) {
  return sobolev_norm(a - b, beta);
}

}  // namespace

ConvergenceAudit convergence_audit(const std::vector<LevelRecord>& levels, double beta,
                                   double kappa) {
  if (levels.size() < 3) throw std::invalid_argument("convergence_audit: need >= 3 levels");
  ConvergenceAudit audit;

  for (const LevelRecord& rec : levels) {
    // Discrete time-derivative surrogate in H^{-2-kappa} over stored fields.
    const auto& fields = rec.result.stored_fields;
    double acc = 0.0;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const double dt_seg = fields[i].first - fields[i - 1].first;
      if (dt_seg <= 0.0) continue;
      const VectorField diff = fields[i].second - fields[i - 1].second;
      const double nrm = sobolev_norm(diff, -2.0 - kappa) / dt_seg;
      acc += dt_seg * nrm * nrm;
    }
    audit.dt_surrogates.push_back(std::sqrt(acc));
  }

  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const LevelRecord& lo = levels[i];
    const LevelRecord& hi = levels[i + 1];
    const auto& fa = lo.result.stored_fields;
    const auto& fb = hi.result.stored_fields;
    const std::size_t count = std::min(fa.size(), fb.size());
    double acc = 0.0;
    double prev_t = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      const double dt_seg = fa[s].first - prev_t;
      prev_t = fa[s].first;
      if (dt_seg <= 0.0) continue;
      const double d = sobolev_distance(fa[s].second, fb[s].second, beta);
      acc += dt_seg * d * d;
    }
    audit.levels.push_back(lo.level);
    audit.distances.push_back(std::sqrt(acc));
  }

  audit.distances_decreasing = true;
  for (std::size_t i = 0; i + 1 < audit.distances.size(); ++i) {
    if (!(audit.distances[i] > audit.distances[i + 1])) audit.distances_decreasing = false;
  }
  return audit;
}

}  // namespace sns
