#pragma once

#include "hiapem/problem.hpp"

namespace hiapem {

/// Settings for the accelerated proximal gradient solver applied to
/// F = G + H with G mu-strongly convex.
struct ApgConfig {
  double mu = 0.0;      ///< strong convexity modulus of G, mu > 0
  double eps = 0.0;     ///< target bound on dist(0, dF(x)), eps > 0
  double l_min = 0.0;   ///< curvature floor, l_min >= mu
  double gamma1 = 2.0;  ///< backtracking increase factor, gamma1 > 1
  double gamma2 = 1.25; ///< inter-step decrease factor, 1 <= gamma2 <= 2 gamma1
  std::int64_t max_iters = 1'000'000;

  void validate() const;
};

/// Output of adap_apg. `certificate` lies in dF(x) and `certificate_norm`
/// = ||certificate|| <= cfg.eps on success. `evals` is the number of G
/// value plus gradient calls attributed to this run.
struct ApgResult {
  Vec x;
  Vec certificate;
  double certificate_norm = 0.0;
  std::int64_t iters = 0;
  std::int64_t evals = 0;
};

/// One accepted backtracking step: the new iterate with its gradient, the
/// accepted trial constant, the momentum weight used, and the extrapolated
/// point with its gradient (kept so the caller can form the certificate
/// without re-evaluating either endpoint).
struct LineSearchStep {
  Vec x_next;
  Vec grad_x_next;
  double accepted_l = 0.0;
  double alpha = 0.0;
  Vec y;
  Vec grad_y;
};

/// x+ = prox_{h/lip}(y - grad_y / lip), the minimizer of
/// <grad_y, x> + (lip/2) ||x - y||^2 + h(x). Bumps n_prox when counters
/// is set.
Vec prox_grad_step(const Vec& grad_y, const Vec& y, double lip,
                   const ProxOracle& h, EvalCounters* counters);

/// Backtracking accelerated step. The first trial constant is
/// max(l_k / gamma1, mu) and each failure multiplies it by gamma1; the
/// momentum point y and weight alpha are recomputed per trial. Acceptance
/// is the quadratic upper bound test at the trial constant, ties included.
/// Throws LineSearchError when the trial constant passes 1e12 without
/// acceptance.
LineSearchStep accel_line_search(const SmoothOracle& g, const ProxOracle& h,
                                 const Vec& x_k, const Vec& x_prev,
                                 double l_k, double mu, double alpha_prev,
                                 double gamma1, EvalCounters* counters);

/// Accelerated proximal gradient descent on F = G + H until an explicit
/// subgradient certificate satisfies ||v|| <= cfg.eps.
///
/// A preprocessing sweep backtracks a plain proximal gradient step from
/// x_init starting at l_min, which fixes the initial curvature estimate and
/// the starting point of the accelerated phase. After every accepted step
/// the certificate
///   v = M (y - x+) + grad G(x+) - grad G(y)
/// is formed (an element of dF(x+)) and tested; the next curvature estimate
/// is max(l_min, M / gamma2).
///
/// Counting contract: G handed in must bump `counters` itself on value and
/// gradient calls (al_smooth_oracle does; wrap plain oracles with
/// counted_oracle). ApgResult.evals is the counter delta over the run.
///
/// Throws ConvergenceError with the best iterate when max_iters runs out;
/// a mu above the true modulus is the usual cause.
ApgResult adap_apg(const SmoothOracle& g, const ProxOracle& h,
                   const Vec& x_init, const ApgConfig& cfg,
                   EvalCounters& counters);

/// Wraps an oracle so every value/gradient call bumps the given counters.
/// Do not wrap oracles that already count (al_smooth_oracle output).
SmoothOracle counted_oracle(const SmoothOracle& g, EvalCounters& counters);

}  // namespace hiapem
