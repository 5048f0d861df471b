#pragma once

#include "hiapem/problem.hpp"

namespace hiapem {

/// Evaluation context for the augmented Lagrangian
///
///   L_beta(x, y, z) = g(x) + h(x) + y^T (Ax - b) + (beta/2) ||Ax - b||^2
///                     + psi(z, beta, f(x))
///
/// at a fixed penalty beta and multiplier pair p = (y, z). The context
/// borrows the problem; the caller keeps it alive. When `counters` is set,
/// al_value bumps n_obj and al_smooth_gradient bumps n_grad on every call.
struct AlContext {
  const ProblemSpec* problem = nullptr;
  double beta = 0.0;
  DualPair p;
  EvalCounters* counters = nullptr;

  AlContext(const ProblemSpec& prob, double beta_, DualPair p_,
            EvalCounters* counters_ = nullptr);
};

/// Shifted penalty on the functional constraints:
///   psi = (1 / (2 beta)) * (||[z + beta f]_+||^2 - ||z||^2).
/// Requires beta > 0 and z >= 0.
double psi_value(const Vec& z, double beta, const Vec& fvals);

/// Augmented Lagrangian value at x. With include_h = false this is the
/// smooth part handed to the inner solver; the full value adds h(x) on top
/// of the same expression, so the two variants differ by exactly h(x).
double al_value(const AlContext& ctx, const Vec& x, bool include_h);

/// Gradient of the smooth part:
///   grad g(x) + A^T (y + beta (Ax - b)) + sum_i [z_i + beta f_i(x)]_+ grad f_i(x).
Vec al_smooth_gradient(const AlContext& ctx, const Vec& x);

/// Value (h excluded) and gradient of the smooth part in one pass: the
/// affine residual and the constraint values feed both results. Writes the
/// gradient into `grad` and returns the value. Bumps n_obj and n_grad.
double al_value_and_gradient(const AlContext& ctx, const Vec& x, Vec& grad);

/// Upper bound on the gradient Lipschitz constant of the smooth part:
///   l0 + 2 rho + beta ||A^T A|| + sum_i (beta B_i (B_i + L_i) + L_i |z_i|).
/// Pass rho = 0 when the proximal shift is already folded into meta.l0.
double smoothness_estimate(const SmoothnessMetadata& meta, const Vec& z,
                           double beta, double rho);

/// Wraps a context into the SmoothOracle consumed by the inner solver
/// (h excluded from the value). The context is copied into the closures.
SmoothOracle al_smooth_oracle(const AlContext& ctx);

}  // namespace hiapem
