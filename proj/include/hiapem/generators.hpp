#pragma once

#include "hiapem/problem.hpp"
#include "hiapem/rng.hpp"

#include <memory>

namespace hiapem {

/// Box-constrained quadratic program with affine rows:
///   min 0.5 x^T Q x + c^T x   s.t.  A x = b,  x in [0, 5]^n,
/// where Q has smallest eigenvalue exactly -rho by spectral construction
/// and b = A x_mid for the box midpoint x_mid, so the feasible set contains
/// x_mid. Dense data is kept alongside the assembled ProblemSpec.
struct LcqpInstance {
  std::shared_ptr<const Mat> q;
  std::shared_ptr<const Vec> c;
  std::shared_ptr<const Mat> a;
  std::shared_ptr<const Vec> b;
  double rho = 0.0;
  std::uint64_t seed = 0;
  ProblemSpec problem;
};

/// Box-constrained quadratic program with convex quadratic constraints:
///   min 0.5 x^T Q0 x + c0^T x
///   s.t. 0.5 x^T Qj x + cj^T x + dj <= 0 (j = 1..m),  x in [-5, 5]^n,
/// where Q0 has smallest eigenvalue exactly -rho, each Qj = Bj Bj^T / n is
/// positive semidefinite, and dj = -1 makes the origin strictly feasible.
struct QcqpInstance {
  std::shared_ptr<const Mat> q0;
  std::shared_ptr<const Vec> c0;
  std::shared_ptr<const std::vector<Mat>> qs;
  std::shared_ptr<const std::vector<Vec>> cs;
  std::shared_ptr<const Vec> d;
  double rho = 0.0;
  std::uint64_t seed = 0;
  ProblemSpec problem;
};

/// Draws one LcqpInstance. The spectrum of Q is d_1 = -rho and d_i uniform
/// on [-rho, 10) otherwise, rotated by the Q factor of a Gaussian matrix.
/// The instance carries full smoothness metadata (||Q||, ||A^T A||).
/// Requires n >= 1, 0 <= m < n, rho > 0.
LcqpInstance gen_lcqp(Index n, Index m, double rho, std::uint64_t seed);

/// Draws one QcqpInstance. Constraint gradients carry Lipschitz constants
/// ||Qj||; no domain bounds B_j are attached, so smoothness_estimate
/// reports metadata as unavailable and solvers fall back to line search.
/// Requires n >= 1, m >= 1, rho > 0.
QcqpInstance gen_qcqp(Index n, Index m, double rho, std::uint64_t seed);

/// Adds the ball constraint ||x - center||^2 - radius^2 <= 0 to a problem
/// as an extra functional constraint, with metadata derived from the box
/// of dom(h). Requires a box-domained prox part.
ProblemSpec with_ball_constraint(const ProblemSpec& problem,
                                 const Vec& center, double radius);

struct BruteForceResult {
  Vec x_best;
  double f_best = 0.0;
  std::int64_t feasible_points = 0;
};

/// Exhaustive grid minimization of g + h over dom(h) for n <= 3 box
/// domains. A grid point is kept when its primal residual is at most
/// 2 * grid_step * L, where L is a Lipschitz estimate of the residual map
/// sampled at the box center and corners. Throws GridError when no grid
/// point passes the test, ConfigError for n > 3 or a box-free domain.
BruteForceResult brute_force_oracle(const ProblemSpec& problem,
                                    double grid_step);

}  // namespace hiapem
