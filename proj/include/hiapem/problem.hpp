#pragma once

#include "hiapem/errors.hpp"
#include "hiapem/types.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace hiapem {

/// Differentiable part g of the objective. `lipschitz_hint` is an upper
/// bound on the Lipschitz constant of the gradient when one is known.
/// `value_and_gradient`, when set, writes the gradient and returns the
/// value in one pass over the shared intermediates; it must agree with
/// the two single entries. Callers fall back to those when it is unset.
struct SmoothOracle {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<double(const Vec&, Vec&)> value_and_gradient;
  std::optional<double> lipschitz_hint;
};

/// Simple closed convex part h of the objective, accessed through its
/// proximal map. `prox(v, step)` solves
///   argmin_x step * h(x) + 0.5 ||x - v||^2,
/// `project` maps onto dom(h), and `value` may return +inf outside dom(h).
/// `box` is set when dom(h) is an axis-aligned box (lower, upper).
struct ProxOracle {
  std::function<Vec(const Vec&, double)> prox;
  std::function<Vec(const Vec&)> project;
  std::function<double(const Vec&)> value;
  std::optional<double> diameter_hint;
  std::optional<std::pair<Vec, Vec>> box;
};

/// Convex smooth functional constraints f_1, ..., f_m, required as f(x) <= 0.
/// `jacobian_transpose_apply(x, w)` returns sum_i w_i * grad f_i(x).
/// `lipschitz[i]` bounds the Lipschitz constant of grad f_i and `bound[i]`
/// bounds max(|f_i|, ||grad f_i||) over dom(h); both vectors are optional
/// metadata and are either empty or of length `count`.
struct ConstraintOracle {
  Index count = 0;
  std::function<Vec(const Vec&)> values;
  std::function<Vec(const Vec&, const Vec&)> jacobian_transpose_apply;
  std::function<Vec(const Vec&, Index)> per_constraint_gradient;
  std::vector<double> lipschitz;
  std::vector<double> bound;
};

/// Affine rows A x = b behind a matrix-free apply pair. `gram_norm` caches
/// ||A^T A||_2 when it has been computed or is known by construction.
struct AffineBlock {
  std::function<Vec(const Vec&)> apply;
  std::function<Vec(const Vec&)> apply_transpose;
  Vec rhs;
  Index rows = 0;
  std::optional<double> gram_norm;
};

/// One instance of
///   min g(x) + h(x)  s.t.  A x = b,  f(x) <= 0.
///
/// `rho` is the weak-convexity constant of g, meaning g + (rho/2)||.||^2 is
/// convex. `strong_convexity` is zero for base problems; regularized
/// subproblems built by build_pp_subproblem carry the modulus of their
/// shifted smooth part there.
struct ProblemSpec {
  Index n = 0;
  SmoothOracle smooth;
  ProxOracle nonsmooth;
  ConstraintOracle constraints;
  std::optional<AffineBlock> affine;
  double rho = 0.0;
  double strong_convexity = 0.0;

  Index affine_rows() const { return affine ? affine->rows : 0; }
};

/// Everything smoothness_estimate needs about an instance. `l0` is the
/// gradient Lipschitz constant of the smooth objective part, `gram_norm`
/// is ||A^T A||_2 (zero without affine rows).
struct SmoothnessMetadata {
  double l0 = 0.0;
  std::vector<double> constraint_lipschitz;
  std::vector<double> constraint_bound;
  double gram_norm = 0.0;
};

/// Result bundle of check_eps_kkt.
struct KktCheck {
  KktReport report;
  bool ok = false;
};

/// Feasibility violation at x: sqrt(||Ax - b||^2 + ||[f(x)]_+||^2).
/// A problem without affine rows or without functional constraints
/// contributes zero through the missing block. Size mismatches throw
/// DimensionError.
double primal_residual(const ProblemSpec& problem, const Vec& x);

/// sum_i |z_i * fvals_i|. Throws DimensionError on length mismatch and
/// DualFeasibilityError if any z_i < 0.
double complementarity(const Vec& z, const Vec& fvals);

/// Evaluates the three residuals at (x, p) with the supplied subgradient
/// certificate and compares each against eps (inclusive).
KktCheck check_eps_kkt(const ProblemSpec& problem, const Vec& x,
                       const DualPair& p, const Vec& certificate, double eps);

/// Returns the subproblem obtained by adding rho * ||x - center||^2 to the
/// smooth part, where rho = problem.rho. The shifted smooth part is
/// rho-strongly convex; constraints, prox part and affine rows are shared
/// with the input. Throws ConfigError when problem.rho <= 0.
ProblemSpec build_pp_subproblem(const ProblemSpec& problem, const Vec& center);

/// Largest eigenvalue of A^T A by power iteration on the apply pair.
/// Runs at most `iters` rounds, stopping early when the Rayleigh quotient
/// changes by a relative factor below `rtol`. Deterministic start vector.
double gram_norm_power_iteration(const AffineBlock& affine, Index n,
                                 int iters = 50, double rtol = 1e-6);

/// Collects metadata for smoothness_estimate from an instance, computing
/// ||A^T A|| by power iteration if the affine block has not cached it.
/// Returns nullopt when the smooth Lipschitz hint or any constraint
/// constant is missing.
std::optional<SmoothnessMetadata> try_collect_metadata(
    const ProblemSpec& problem);

/// Same as try_collect_metadata but throws MetadataError instead of
/// returning nullopt.
SmoothnessMetadata collect_metadata(const ProblemSpec& problem);

/// Prox part fixed to zero: prox and projection are the identity.
ProxOracle zero_prox(Index n);

/// Indicator of the box [lower, upper] with clamping prox and projection.
/// `value` returns +inf outside the box (tolerance 1e-12 per coordinate).
ProxOracle box_prox(Vec lower, Vec upper);

/// Convenience constructor of box_prox with constant bounds.
ProxOracle box_prox(Index n, double lower, double upper);

/// Dense affine block; computes and caches ||A^T A|| by power iteration.
AffineBlock dense_affine(const Mat& a, Vec b);

/// Smooth oracle for 0.5 x^T Q x + c^T x with Q symmetric. The Lipschitz
/// hint is `lip` when given, otherwise left unset.
SmoothOracle quadratic_oracle(Mat q, Vec c,
                              std::optional<double> lip = std::nullopt);

}  // namespace hiapem
