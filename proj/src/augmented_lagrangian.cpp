#include "hiapem/augmented_lagrangian.hpp"

#include <cmath>
#include <string>

namespace hiapem {

AlContext::AlContext(const ProblemSpec& prob, double beta_, DualPair p_,
                     EvalCounters* counters_)
    : problem(&prob), beta(beta_), p(std::move(p_)), counters(counters_) {
  if (beta <= 0.0)
    throw ConfigError("penalty beta must be positive, got " +
                      std::to_string(beta));
  if (p.y.size() != prob.affine_rows())
    throw DimensionError("y has length " + std::to_string(p.y.size()) +
                         ", affine block has " +
                         std::to_string(prob.affine_rows()) + " rows");
  if (p.z.size() != prob.constraints.count)
    throw DimensionError("z has length " + std::to_string(p.z.size()) +
                         ", problem has " +
                         std::to_string(prob.constraints.count) +
                         " functional constraints");
  for (Index i = 0; i < p.z.size(); ++i)
    if (p.z[i] < 0.0)
      throw DualFeasibilityError("z[" + std::to_string(i) + "] < 0");
}

double psi_value(const Vec& z, double beta, const Vec& fvals) {
  if (beta <= 0.0)
    throw ConfigError("psi_value needs beta > 0, got " +
                      std::to_string(beta));
  if (z.size() != fvals.size())
    throw DimensionError("z and f have mismatched lengths");
  for (Index i = 0; i < z.size(); ++i)
    if (z[i] < 0.0)
      throw DualFeasibilityError("z[" + std::to_string(i) + "] < 0");
  const double shifted = (z + beta * fvals).cwiseMax(0.0).squaredNorm();
  return (shifted - z.squaredNorm()) / (2.0 * beta);
}

double al_value(const AlContext& ctx, const Vec& x, bool include_h) {
  const ProblemSpec& prob = *ctx.problem;
  if (x.size() != prob.n)
    throw DimensionError("x has length " + std::to_string(x.size()) +
                         ", problem dimension is " + std::to_string(prob.n));

  double v = prob.smooth.value(x);
  if (prob.affine) {
    Vec r = prob.affine->apply(x) - prob.affine->rhs;
    v += ctx.p.y.dot(r) + 0.5 * ctx.beta * r.squaredNorm();
  }
  if (prob.constraints.count > 0)
    v += psi_value(ctx.p.z, ctx.beta, prob.constraints.values(x));
  if (include_h) v += prob.nonsmooth.value(x);
  if (ctx.counters) ++ctx.counters->n_obj;
  return v;
}

Vec al_smooth_gradient(const AlContext& ctx, const Vec& x) {
  const ProblemSpec& prob = *ctx.problem;
  if (x.size() != prob.n)
    throw DimensionError("x has length " + std::to_string(x.size()) +
                         ", problem dimension is " + std::to_string(prob.n));

  Vec grad = prob.smooth.gradient(x);
  if (prob.affine) {
    Vec r = prob.affine->apply(x) - prob.affine->rhs;
    grad += prob.affine->apply_transpose(ctx.p.y + ctx.beta * r);
  }
  if (prob.constraints.count > 0) {
    Vec w = (ctx.p.z + ctx.beta * prob.constraints.values(x)).cwiseMax(0.0);
    grad += prob.constraints.jacobian_transpose_apply(x, w);
  }
  if (ctx.counters) ++ctx.counters->n_grad;
  return grad;
}

double al_value_and_gradient(const AlContext& ctx, const Vec& x, Vec& grad) {
  const ProblemSpec& prob = *ctx.problem;
  if (x.size() != prob.n)
    throw DimensionError("x has length " + std::to_string(x.size()) +
                         ", problem dimension is " + std::to_string(prob.n));

  double v;
  if (prob.smooth.value_and_gradient) {
    v = prob.smooth.value_and_gradient(x, grad);
  } else {
    v = prob.smooth.value(x);
    grad = prob.smooth.gradient(x);
  }
  if (prob.affine) {
    Vec r = prob.affine->apply(x) - prob.affine->rhs;
    v += ctx.p.y.dot(r) + 0.5 * ctx.beta * r.squaredNorm();
    grad += prob.affine->apply_transpose(ctx.p.y + ctx.beta * r);
  }
  if (prob.constraints.count > 0) {
    const Vec f = prob.constraints.values(x);
    v += psi_value(ctx.p.z, ctx.beta, f);
    Vec w = (ctx.p.z + ctx.beta * f).cwiseMax(0.0);
    grad += prob.constraints.jacobian_transpose_apply(x, w);
  }
  if (ctx.counters) {
    ++ctx.counters->n_obj;
    ++ctx.counters->n_grad;
  }
  return v;
}

double smoothness_estimate(const SmoothnessMetadata& meta, const Vec& z,
                           double beta, double rho) {
  if (beta < 0.0 || rho < 0.0)
    throw ConfigError("smoothness_estimate needs beta >= 0 and rho >= 0");
  const auto m = meta.constraint_lipschitz.size();
  if (meta.constraint_bound.size() != m ||
      static_cast<std::size_t>(z.size()) != m)
    throw DimensionError("constraint metadata and z have mismatched lengths");

  double l = meta.l0 + 2.0 * rho + beta * meta.gram_norm;
  for (std::size_t i = 0; i < m; ++i) {
    const double bi = meta.constraint_bound[i];
    const double li = meta.constraint_lipschitz[i];
    l += beta * bi * (bi + li) + li * std::abs(z[static_cast<Index>(i)]);
  }
  return l;
}

SmoothOracle al_smooth_oracle(const AlContext& ctx) {
  SmoothOracle g;
  g.value = [ctx](const Vec& x) { return al_value(ctx, x, false); };
  g.gradient = [ctx](const Vec& x) { return al_smooth_gradient(ctx, x); };
  g.value_and_gradient = [ctx](const Vec& x, Vec& grad) {
    return al_value_and_gradient(ctx, x, grad);
  };
  return g;
}

}  // namespace hiapem
