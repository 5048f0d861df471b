#pragma once

#include "hiapem/ialm.hpp"

namespace hiapem {

/// Settings for the pure-penalty loop on a strongly convex subproblem.
/// Meaning of shared fields as in IalmConfig; `beta_init` replaces beta0
/// so callers can warm-start the penalty from an earlier run.
struct PenmmConfig {
  double eps = 0.0;
  double beta_init = 0.01;
  double sigma = 3.0;
  double rho = 0.0;
  ApgConfig apg;
  int max_outer = 60;
  bool seed_l_min_from_estimate = true;
  OuterTraceFn trace;

  void validate() const;
};

struct PenmmOutput {
  double beta_out = 0.0;
  Vec x_out;
  DualPair p_out;
  KktReport report;
  int outer_iters = 0;
  EvalCounters counters;
};

/// Penalty method with a frozen multiplier estimate p_bar.
///
/// Every outer iteration minimizes the augmented Lagrangian at
/// (beta_k, p_bar) to tolerance eps * min(1, sqrt(rho)), recomputes the
/// one-shot pair
///   y = y_bar + beta_k (Ax - b),   z = [z_bar + beta_k f(x)]_+
/// from p_bar (never from the previous iteration), and stops once the
/// residual triple at (x, y, z) is within eps. Only the penalty changes
/// between iterations: beta_k = beta_init * sigma^k. At least one
/// iteration always runs, so beta_out is the penalty of the accepted
/// iteration. Starts from x = center. Throws ConvergenceError when
/// max_outer runs out.
PenmmOutput penmm_solve(const ProblemSpec& sub, const Vec& center,
                        const DualPair& p_bar, const PenmmConfig& cfg);

/// Penalty level beyond which the stopping test is guaranteed to pass,
/// as a function of the dual solution size and the distance of the frozen
/// estimate from it:
///   max(4 (p*^2 + gap^2) / eps, 4 gap / eps, 8).
double predicted_beta_bound(double p_star_norm, double p_gap_norm,
                            double eps);

}  // namespace hiapem
