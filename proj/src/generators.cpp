#include "hiapem/generators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace hiapem {

namespace {

/// Symmetric matrix with prescribed spectrum: U diag(d) U^T for the
/// orthogonal factor U of a Gaussian draw. Re-symmetrized to keep
/// round-off out of the eigenvalues' imaginary parts.
Mat spectral_matrix(Rng& rng, const Vec& d) {
  const Index n = d.size();
  const Mat gauss = rng.normal_mat(n, n);
  const Mat u = Eigen::HouseholderQR<Mat>(gauss).householderQ();
  Mat q = u * d.asDiagonal() * u.transpose();
  return 0.5 * (q + q.transpose());
}

/// Spectrum draw for the objective blocks: smallest eigenvalue pinned to
/// -rho, the rest uniform on [-rho, 10).
Vec objective_spectrum(Rng& rng, Index n, double rho) {
  Vec d(n);
  d[0] = -rho;
  for (Index i = 1; i < n; ++i) d[i] = rng.uniform(-rho, 10.0);
  return d;
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double psd_norm(const Mat& q) {
  const Index n = q.rows();
  if (n == 0) return 0.0;
  Vec v = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vec w = q * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= 1e-10 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace

LcqpInstance gen_lcqp(Index n, Index m, double rho, std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_lcqp needs n >= 1");
  if (m < 0 || m >= n) throw ConfigError("gen_lcqp needs 0 <= m < n");
  if (!(rho > 0.0)) throw ConfigError("gen_lcqp needs rho > 0");

  Rng rng(seed);
  const Vec d = objective_spectrum(rng, n, rho);
  auto q = std::make_shared<const Mat>(spectral_matrix(rng, d));
  auto c = std::make_shared<const Vec>(rng.normal_vec(n));
  auto a = std::make_shared<const Mat>(rng.normal_mat(m, n));
  const Vec x_mid = Vec::Constant(n, 2.5);
  auto b = std::make_shared<const Vec>(*a * x_mid);

  LcqpInstance inst;
  inst.q = q;
  inst.c = c;
  inst.a = a;
  inst.b = b;
  inst.rho = rho;
  inst.seed = seed;

  ProblemSpec& prob = inst.problem;
  prob.n = n;
  prob.smooth.value = [q, c](const Vec& x) {
    return 0.5 * x.dot(*q * x) + c->dot(x);
  };
  prob.smooth.gradient = [q, c](const Vec& x) { return Vec(*q * x + *c); };
  prob.smooth.value_and_gradient = [q, c](const Vec& x, Vec& grad) {
    Vec qx = *q * x;
    const double v = 0.5 * x.dot(qx) + c->dot(x);
    grad = std::move(qx);
    grad += *c;
    return v;
  };
  prob.smooth.lipschitz_hint = d.cwiseAbs().maxCoeff();
  prob.nonsmooth = box_prox(n, 0.0, 5.0);
  if (m > 0) prob.affine = dense_affine(*a, *b);
  prob.rho = rho;
  return inst;
}

QcqpInstance gen_qcqp(Index n, Index m, double rho, std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_qcqp needs n >= 1");
  if (m < 1) throw ConfigError("gen_qcqp needs m >= 1");
  if (!(rho > 0.0)) throw ConfigError("gen_qcqp needs rho > 0");

  Rng rng(seed);
  const Vec d0 = objective_spectrum(rng, n, rho);
  auto q0 = std::make_shared<const Mat>(spectral_matrix(rng, d0));
  auto c0 = std::make_shared<const Vec>(rng.normal_vec(n));

  std::vector<Mat> qs_raw;
  std::vector<Vec> cs_raw;
  std::vector<double> lips;
  qs_raw.reserve(m);
  cs_raw.reserve(m);
  for (Index j = 0; j < m; ++j) {
    const Mat bj = rng.normal_mat(n, n);
    Mat qj = (bj * bj.transpose()) / static_cast<double>(n);
    qj = 0.5 * (qj + qj.transpose());
    lips.push_back(psd_norm(qj));
    qs_raw.push_back(std::move(qj));
    cs_raw.push_back(rng.normal_vec(n));
  }
  auto qs = std::make_shared<const std::vector<Mat>>(std::move(qs_raw));
  auto cs = std::make_shared<const std::vector<Vec>>(std::move(cs_raw));
  auto dvals = std::make_shared<const Vec>(Vec::Constant(m, -1.0));

  QcqpInstance inst;
  inst.q0 = q0;
  inst.c0 = c0;
  inst.qs = qs;
  inst.cs = cs;
  inst.d = dvals;
  inst.rho = rho;
  inst.seed = seed;

  ProblemSpec& prob = inst.problem;
  prob.n = n;
  prob.smooth.value = [q0, c0](const Vec& x) {
    return 0.5 * x.dot(*q0 * x) + c0->dot(x);
  };
  prob.smooth.gradient = [q0, c0](const Vec& x) {
    return Vec(*q0 * x + *c0);
  };
  prob.smooth.value_and_gradient = [q0, c0](const Vec& x, Vec& grad) {
    Vec qx = *q0 * x;
    const double v = 0.5 * x.dot(qx) + c0->dot(x);
    grad = std::move(qx);
    grad += *c0;
    return v;
  };
  prob.smooth.lipschitz_hint = d0.cwiseAbs().maxCoeff();
  prob.nonsmooth = box_prox(n, -5.0, 5.0);
  prob.constraints.count = m;
  prob.constraints.values = [qs, cs, dvals, m](const Vec& x) {
    Vec out(m);
    for (Index j = 0; j < m; ++j)
      out[j] = 0.5 * x.dot((*qs)[j] * x) + (*cs)[j].dot(x) + (*dvals)[j];
    return out;
  };
  prob.constraints.jacobian_transpose_apply = [qs, cs, m](const Vec& x,
                                                          const Vec& w) {
    Vec acc = Vec::Zero(x.size());
    for (Index j = 0; j < m; ++j) {
      if (w[j] == 0.0) continue;
      acc += w[j] * ((*qs)[j] * x + (*cs)[j]);
    }
    return acc;
  };
  prob.constraints.per_constraint_gradient = [qs, cs](const Vec& x,
                                                      Index j) {
    return Vec((*qs)[j] * x + (*cs)[j]);
  };
  prob.constraints.lipschitz = lips;
  prob.rho = rho;
  return inst;
}

ProblemSpec with_ball_constraint(const ProblemSpec& problem,
                                 const Vec& center, double radius) {
  if (center.size() != problem.n)
    throw DimensionError("ball center has wrong length");
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  if (!problem.nonsmooth.box)
    throw ConfigError("with_ball_constraint needs a box-domained prox part");

  ProblemSpec out = problem;
  auto c = std::make_shared<const Vec>(center);
  const double r2 = radius * radius;
  const Index base = problem.constraints.count;
  auto base_oracle = problem.constraints;

  out.constraints.count = base + 1;
  out.constraints.values = [base_oracle, base, c, r2](const Vec& x) {
    Vec out_v(base + 1);
    if (base > 0) out_v.head(base) = base_oracle.values(x);
    out_v[base] = (x - *c).squaredNorm() - r2;
    return out_v;
  };
  out.constraints.jacobian_transpose_apply =
      [base_oracle, base, c](const Vec& x, const Vec& w) {
        Vec acc = w[base] * 2.0 * (x - *c);
        if (base > 0)
          acc += base_oracle.jacobian_transpose_apply(x, w.head(base));
        return acc;
      };
  out.constraints.per_constraint_gradient =
      [base_oracle, base, c](const Vec& x, Index j) {
        if (j < base) return base_oracle.per_constraint_gradient(x, j);
        return Vec(2.0 * (x - *c));
      };

  // Metadata over the box: |f| <= (D + r)^2 + r^2 and ||grad f|| <= 2(D + r)
  // for D the largest box-corner distance from the center.
  const auto& box = *problem.nonsmooth.box;
  double dmax_sq = 0.0;
  for (Index i = 0; i < problem.n; ++i) {
    const double lo = std::abs(box.first[i] - (*c)[i]);
    const double hi = std::abs(box.second[i] - (*c)[i]);
    const double coord = std::max(lo, hi);
    dmax_sq += coord * coord;
  }
  const double dmax = std::sqrt(dmax_sq);
  const double fbound = std::max(dmax * dmax + r2, 2.0 * dmax);
  if (!base_oracle.lipschitz.empty() || base == 0) {
    out.constraints.lipschitz = base_oracle.lipschitz;
    out.constraints.lipschitz.push_back(2.0);
  }
  if (!base_oracle.bound.empty() || base == 0) {
    out.constraints.bound = base_oracle.bound;
    out.constraints.bound.push_back(fbound);
  }
  return out;
}

BruteForceResult brute_force_oracle(const ProblemSpec& problem,
                                    double grid_step) {
  if (problem.n > 3)
    throw ConfigError("brute_force_oracle handles n <= 3 only");
  if (!(grid_step > 0.0)) throw ConfigError("grid_step must be positive");
  if (!problem.nonsmooth.box)
    throw ConfigError("brute_force_oracle needs a box-domained prox part");
  const Vec& lo = problem.nonsmooth.box->first;
  const Vec& hi = problem.nonsmooth.box->second;
  const Index n = problem.n;

  // Residual-map Lipschitz estimate sampled at the center and corners:
  // sqrt(||A||_F^2 + sum_i ||grad f_i||^2).
  std::vector<Vec> samples;
  samples.push_back(0.5 * (lo + hi));
  const int corners = 1 << n;
  for (int mask = 0; mask < corners; ++mask) {
    Vec corner(n);
    for (Index i = 0; i < n; ++i)
      corner[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    samples.push_back(std::move(corner));
  }
  double a_frob_sq = 0.0;
  if (problem.affine)
    for (Index i = 0; i < n; ++i) {
      Vec e = Vec::Zero(n);
      e[i] = 1.0;
      a_frob_sq += problem.affine->apply(e).squaredNorm();
    }
  double lip_est = 0.0;
  for (const Vec& s : samples) {
    double grads_sq = 0.0;
    for (Index i = 0; i < problem.constraints.count; ++i)
      grads_sq += problem.constraints.per_constraint_gradient(s, i)
                      .squaredNorm();
    lip_est = std::max(lip_est, std::sqrt(a_frob_sq + grads_sq));
  }
  const double slack = 2.0 * grid_step * lip_est;

  std::array<Index, 3> counts{1, 1, 1};
  for (Index i = 0; i < n; ++i)
    counts[static_cast<std::size_t>(i)] =
        static_cast<Index>(std::floor((hi[i] - lo[i]) / grid_step + 1e-9)) +
        1;

  BruteForceResult best;
  best.f_best = std::numeric_limits<double>::infinity();
  Vec x(n);
  for (Index i0 = 0; i0 < counts[0]; ++i0) {
    if (n >= 1) x[0] = lo[0] + static_cast<double>(i0) * grid_step;
    for (Index i1 = 0; i1 < counts[1]; ++i1) {
      if (n >= 2) x[1] = lo[1] + static_cast<double>(i1) * grid_step;
      for (Index i2 = 0; i2 < counts[2]; ++i2) {
        if (n >= 3) x[2] = lo[2] + static_cast<double>(i2) * grid_step;
        if (primal_residual(problem, x) > slack) continue;
        ++best.feasible_points;
        const double f = problem.smooth.value(x) + problem.nonsmooth.value(x);
        if (f < best.f_best) {
          best.f_best = f;
          best.x_best = x;
        }
      }
    }
  }
  if (best.feasible_points == 0)
    throw GridError("no grid point is feasible at step " +
                    std::to_string(grid_step));
  return best;
}

}  // namespace hiapem
