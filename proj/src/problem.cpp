#include "hiapem/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace hiapem {

namespace {

void require_dim(const ProblemSpec& problem, const Vec& x) {
  if (x.size() != problem.n)
    throw DimensionError("x has length " + std::to_string(x.size()) +
                         ", problem dimension is " +
                         std::to_string(problem.n));
}

}  // namespace

double primal_residual(const ProblemSpec& problem, const Vec& x) {
  require_dim(problem, x);
  double sq = 0.0;
  if (problem.affine) {
    Vec r = problem.affine->apply(x) - problem.affine->rhs;
    if (r.size() != problem.affine->rows)
      throw DimensionError("affine apply returned " +
                           std::to_string(r.size()) + " rows, expected " +
                           std::to_string(problem.affine->rows));
    sq += r.squaredNorm();
  }
  if (problem.constraints.count > 0) {
    Vec f = problem.constraints.values(x);
    if (f.size() != problem.constraints.count)
      throw DimensionError("constraint oracle returned " +
                           std::to_string(f.size()) + " values, expected " +
                           std::to_string(problem.constraints.count));
    sq += f.cwiseMax(0.0).squaredNorm();
  }
  return std::sqrt(sq);
}

double complementarity(const Vec& z, const Vec& fvals) {
  if (z.size() != fvals.size())
    throw DimensionError("z has length " + std::to_string(z.size()) +
                         ", f has length " + std::to_string(fvals.size()));
  double s = 0.0;
  for (Index i = 0; i < z.size(); ++i) {
    if (z[i] < 0.0)
      throw DualFeasibilityError("z[" + std::to_string(i) +
                                 "] = " + std::to_string(z[i]) + " < 0");
    s += std::abs(z[i] * fvals[i]);
  }
  return s;
}

KktCheck check_eps_kkt(const ProblemSpec& problem, const Vec& x,
                       const DualPair& p, const Vec& certificate,
                       double eps) {
  if (eps < 0.0) throw ConfigError("eps must be nonnegative");
  require_dim(problem, x);
  if (p.y.size() != problem.affine_rows())
    throw DimensionError("y has length " + std::to_string(p.y.size()) +
                         ", affine block has " +
                         std::to_string(problem.affine_rows()) + " rows");
  if (p.z.size() != problem.constraints.count)
    throw DimensionError("z has length " + std::to_string(p.z.size()) +
                         ", problem has " +
                         std::to_string(problem.constraints.count) +
                         " functional constraints");
  if (certificate.size() != problem.n)
    throw DimensionError("certificate has length " +
                         std::to_string(certificate.size()) +
                         ", problem dimension is " + std::to_string(problem.n));

  KktCheck out;
  out.report.pres = primal_residual(problem, x);
  Vec f = problem.constraints.count > 0 ? problem.constraints.values(x)
                                        : Vec(0);
  out.report.comp = complementarity(p.z, f);
  out.report.certificate = certificate;
  out.report.dres = certificate.norm();
  out.ok = out.report.pres <= eps && out.report.dres <= eps &&
           out.report.comp <= eps;
  return out;
}

ProblemSpec build_pp_subproblem(const ProblemSpec& problem,
                                const Vec& center) {
  if (problem.rho <= 0.0)
    throw ConfigError("build_pp_subproblem needs rho > 0, got " +
                      std::to_string(problem.rho));
  require_dim(problem, center);

  const double rho = problem.rho;
  ProblemSpec sub = problem;
  sub.strong_convexity = rho;

  auto c = std::make_shared<Vec>(center);
  auto base_value = problem.smooth.value;
  auto base_gradient = problem.smooth.gradient;
  sub.smooth.value = [base_value, c, rho](const Vec& x) {
    return base_value(x) + rho * (x - *c).squaredNorm();
  };
  sub.smooth.gradient = [base_gradient, c, rho](const Vec& x) {
    return Vec(base_gradient(x) + 2.0 * rho * (x - *c));
  };
  if (problem.smooth.value_and_gradient) {
    auto base_fused = problem.smooth.value_and_gradient;
    sub.smooth.value_and_gradient = [base_fused, c, rho](const Vec& x,
                                                         Vec& grad) {
      const double v = base_fused(x, grad);
      const Vec d = x - *c;
      grad += 2.0 * rho * d;
      return v + rho * d.squaredNorm();
    };
  }
  if (problem.smooth.lipschitz_hint)
    sub.smooth.lipschitz_hint = *problem.smooth.lipschitz_hint + 2.0 * rho;
  return sub;
}

double gram_norm_power_iteration(const AffineBlock& affine, Index n,
                                 int iters, double rtol) {
  if (affine.rows == 0 || n == 0) return 0.0;
  Vec v = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec w = affine.apply_transpose(affine.apply(v));
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= rtol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

std::optional<SmoothnessMetadata> try_collect_metadata(
    const ProblemSpec& problem) {
  if (!problem.smooth.lipschitz_hint) return std::nullopt;
  const auto m = static_cast<std::size_t>(problem.constraints.count);
  if (m > 0 && (problem.constraints.lipschitz.size() != m ||
                problem.constraints.bound.size() != m))
    return std::nullopt;

  SmoothnessMetadata meta;
  meta.l0 = *problem.smooth.lipschitz_hint;
  meta.constraint_lipschitz = problem.constraints.lipschitz;
  meta.constraint_bound = problem.constraints.bound;
  if (problem.affine)
    meta.gram_norm = problem.affine->gram_norm
                         ? *problem.affine->gram_norm
                         : gram_norm_power_iteration(*problem.affine,
                                                     problem.n);
  return meta;
}

SmoothnessMetadata collect_metadata(const ProblemSpec& problem) {
  auto meta = try_collect_metadata(problem);
  if (!meta)
    throw MetadataError(
        "problem carries no smooth Lipschitz hint or incomplete constraint "
        "constants");
  return *meta;
}

ProxOracle zero_prox(Index n) {
  ProxOracle h;
  h.prox = [](const Vec& v, double) { return v; };
  h.project = [](const Vec& v) { return v; };
  h.value = [](const Vec&) { return 0.0; };
  (void)n;
  return h;
}

ProxOracle box_prox(Vec lower, Vec upper) {
  if (lower.size() != upper.size())
    throw DimensionError("box bounds have mismatched lengths");
  for (Index i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i])
      throw ConfigError("box has lower[" + std::to_string(i) +
                        "] > upper[" + std::to_string(i) + "]");
  auto lo = std::make_shared<Vec>(std::move(lower));
  auto hi = std::make_shared<Vec>(std::move(upper));

  ProxOracle h;
  h.prox = [lo, hi](const Vec& v, double) {
    return Vec(v.cwiseMax(*lo).cwiseMin(*hi));
  };
  h.project = [lo, hi](const Vec& v) {
    return Vec(v.cwiseMax(*lo).cwiseMin(*hi));
  };
  h.value = [lo, hi](const Vec& x) {
    for (Index i = 0; i < x.size(); ++i)
      if (x[i] < (*lo)[i] - 1e-12 || x[i] > (*hi)[i] + 1e-12)
        return std::numeric_limits<double>::infinity();
    return 0.0;
  };
  h.diameter_hint = (*hi - *lo).norm();
  h.box = std::make_pair(*lo, *hi);
  return h;
}

ProxOracle box_prox(Index n, double lower, double upper) {
  return box_prox(Vec::Constant(n, lower), Vec::Constant(n, upper));
}

AffineBlock dense_affine(const Mat& a, Vec b) {
  if (a.rows() != b.size())
    throw DimensionError("A has " + std::to_string(a.rows()) +
                         " rows, b has length " + std::to_string(b.size()));
  auto ap = std::make_shared<Mat>(a);
  AffineBlock blk;
  blk.apply = [ap](const Vec& x) { return Vec(*ap * x); };
  blk.apply_transpose = [ap](const Vec& v) {
    return Vec(ap->transpose() * v);
  };
  blk.rhs = std::move(b);
  blk.rows = a.rows();
  blk.gram_norm = gram_norm_power_iteration(blk, a.cols());
  return blk;
}

SmoothOracle quadratic_oracle(Mat q, Vec c, std::optional<double> lip) {
  if (q.rows() != q.cols() || q.rows() != c.size())
    throw DimensionError("quadratic data sizes disagree");
  auto qp = std::make_shared<Mat>(std::move(q));
  auto cp = std::make_shared<Vec>(std::move(c));
  SmoothOracle g;
  g.value = [qp, cp](const Vec& x) {
    return 0.5 * x.dot(*qp * x) + cp->dot(x);
  };
  g.gradient = [qp, cp](const Vec& x) { return Vec(*qp * x + *cp); };
  g.value_and_gradient = [qp, cp](const Vec& x, Vec& grad) {
    Vec qx = *qp * x;
    const double v = 0.5 * x.dot(qx) + cp->dot(x);
    grad = std::move(qx);
    grad += *cp;
    return v;
  };
  g.lipschitz_hint = lip;
  return g;
}

}  // namespace hiapem
