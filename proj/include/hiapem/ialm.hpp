#pragma once

#include "hiapem/adap_apg.hpp"
#include "hiapem/augmented_lagrangian.hpp"
#include "hiapem/problem.hpp"

#include <functional>

namespace hiapem {

/// One outer-iteration record emitted through the trace hooks of
/// ialm_solve and penmm_solve. `dual_source` is the multiplier pair the
/// augmented Lagrangian was built from in that iteration and `dual_next`
/// the pair produced by the update afterwards.
struct OuterTrace {
  int k = 0;
  double beta = 0.0;
  Vec x;
  DualPair dual_source;
  DualPair dual_next;
  KktReport report;
  EvalCounters counters_delta;
};

using OuterTraceFn = std::function<void(const OuterTrace&)>;

/// Settings for the inexact augmented Lagrangian loop on a strongly convex
/// subproblem. `apg` is a template: its mu and eps are overwritten each
/// outer iteration, the remaining fields pass through.
struct IalmConfig {
  double eps = 0.0;     ///< target residual level, eps > 0
  double beta0 = 0.01;  ///< initial penalty, beta0 > 0
  double sigma = 3.0;   ///< penalty growth factor, sigma > 1
  double rho = 0.0;     ///< strong convexity modulus of the subproblem
  ApgConfig apg;
  int max_outer = 60;
  /// When the subproblem carries full metadata, each inner solve floors its
  /// curvature at the smoothness estimate for the current (z, beta), which
  /// makes the first backtracking trial pass.
  bool seed_l_min_from_estimate = true;
  OuterTraceFn trace;

  void validate() const;
};

/// Output of ialm_solve. `beta_out` is the penalty of the accepted
/// iteration, `report` the residual triple of the subproblem at
/// (x_out, p_out), `outer_iters` the number of inner solves.
struct IalmOutput {
  double beta_out = 0.0;
  Vec x_out;
  DualPair p_out;
  KktReport report;
  int outer_iters = 0;
  EvalCounters counters;
};

/// Per-iteration inner tolerance
///   sqrt((sigma - 1) / (sigma + 1)) * (eps / 2) * min(1, sqrt(rho)).
double inner_tolerance(double eps, double sigma, double rho);

/// Multiplier step at penalty beta:
///   y' = y + beta (Ax - b),   z' = max(0, z + beta f(x)).
DualPair dual_update(const DualPair& p, double beta, const Vec& ax_minus_b,
                     const Vec& fvals);

/// Inexact augmented Lagrangian method on a rho-strongly convex subproblem.
/// Each outer iteration minimizes the augmented Lagrangian at (beta_k, p_k)
/// to the inner tolerance, updates the multipliers, and stops once
///   max((||p_k|| + ||p_{k+1}||) / beta_k, sum_i |z_i' f_i(x)|) <= eps,
/// which certifies the full residual triple at level eps. The penalty
/// follows beta_k = beta0 * sigma^k. Warm starts: each inner solve starts
/// from the previous x. Throws ConvergenceError when max_outer runs out.
IalmOutput ialm_solve(const ProblemSpec& sub, const Vec& x_init,
                      const IalmConfig& cfg);

/// Iteration cap implied by the stopping test as a function of the dual
/// solution size: ceil(log_sigma(C)) + 1 with
///   C = max(10 p*^2 / (beta0 eps), 8 p* / (beta0 eps), 4 / beta0).
std::int64_t predicted_outer_bound(double p_star_norm, double beta0,
                                   double sigma, double eps);

}  // namespace hiapem
