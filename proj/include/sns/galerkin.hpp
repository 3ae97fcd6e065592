#pragma once

#include <vector>

#include "sns/solver.hpp"

namespace sns {

// One smooth-approximation level: same noise path, same stepper, with the
// driving field, its heat companion and the initial condition low-passed at
// the level.  Coupled realisations: the level trajectory and the primary one
// share every Gaussian draw.
struct LevelRecord {
  double level = 0.0;
  RunResult result;
  double sup_wl_sq = 0.0;     // sup_t |w_low|^2 over the trajectory
  double h1_integral = 0.0;   // int |w_low|_{H1}^2 dt (cadence quadrature)
};

LevelRecord run_level(const SolverConfig& base, double level);

// Pairwise self-convergence between coupled levels n and 2n in
// L^2_t H^beta, plus a discrete time-derivative surrogate in H^{-2-kappa}.
struct ConvergenceAudit {
  std::vector<double> levels;          // levels with a doubled partner
  std::vector<double> distances;       // d(n) = |w^n - w^{2n}|_{L2_t H^beta}
  std::vector<double> dt_surrogates;   // per input level
  bool distances_decreasing = false;
};

ConvergenceAudit convergence_audit(const std::vector<LevelRecord>& levels, double beta,
                                   double kappa);

}  // namespace sns
