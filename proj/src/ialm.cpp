#include "hiapem/ialm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hiapem {

void IalmConfig::validate() const {
  if (!(eps > 0.0)) throw ConfigError("IalmConfig.eps must be positive");
  if (!(beta0 > 0.0)) throw ConfigError("IalmConfig.beta0 must be positive");
  if (!(sigma > 1.0)) throw ConfigError("IalmConfig.sigma must exceed 1");
  if (!(rho > 0.0)) throw ConfigError("IalmConfig.rho must be positive");
  if (max_outer <= 0) throw ConfigError("IalmConfig.max_outer must be positive");
}

double inner_tolerance(double eps, double sigma, double rho) {
  if (!(eps > 0.0) || !(sigma > 1.0) || !(rho > 0.0))
    throw ConfigError("inner_tolerance needs eps > 0, sigma > 1, rho > 0");
  return std::sqrt((sigma - 1.0) / (sigma + 1.0)) * (eps / 2.0) *
         std::min(1.0, std::sqrt(rho));
}

DualPair dual_update(const DualPair& p, double beta, const Vec& ax_minus_b,
                     const Vec& fvals) {
  if (!(beta > 0.0)) throw ConfigError("dual_update needs beta > 0");
  if (p.y.size() != ax_minus_b.size() || p.z.size() != fvals.size())
    throw DimensionError("dual_update: residual lengths do not match p");
  DualPair next;
  next.y = p.y + beta * ax_minus_b;
  next.z = (p.z + beta * fvals).cwiseMax(0.0);
  return next;
}

IalmOutput ialm_solve(const ProblemSpec& sub, const Vec& x_init,
                      const IalmConfig& cfg) {
  cfg.validate();
  if (sub.strong_convexity <= 0.0)
    throw ConfigError("ialm_solve needs a strongly convex subproblem");
  if (x_init.size() != sub.n)
    throw DimensionError("x_init has length " +
                         std::to_string(x_init.size()) +
                         ", subproblem dimension is " + std::to_string(sub.n));

  const double eps_bar = inner_tolerance(cfg.eps, cfg.sigma, cfg.rho);
  const auto meta =
      cfg.seed_l_min_from_estimate ? try_collect_metadata(sub) : std::nullopt;

  EvalCounters counters;
  DualPair p = DualPair::zeros(sub.affine_rows(), sub.constraints.count);
  double beta = cfg.beta0;
  Vec x = x_init;

  for (int k = 0; k < cfg.max_outer; ++k) {
    ApgConfig apg = cfg.apg;
    apg.mu = cfg.rho;
    apg.eps = eps_bar;
    if (meta)
      // meta.l0 already contains any proximal shift of this subproblem,
      // so the shift argument is zero here.
      apg.l_min = std::max(apg.mu, smoothness_estimate(*meta, p.z, beta, 0.0));
    else
      apg.l_min = std::max(apg.mu, apg.l_min);

    const EvalCounters before = counters;
    AlContext ctx(sub, beta, p, &counters);
    ApgResult inner = adap_apg(al_smooth_oracle(ctx), sub.nonsmooth, x, apg,
                               counters);
    x = inner.x;

    const Vec fv = sub.constraints.count > 0 ? sub.constraints.values(x)
                                             : Vec(0);
    const Vec ax_b =
        sub.affine ? Vec(sub.affine->apply(x) - sub.affine->rhs) : Vec(0);
    const DualPair p_next = dual_update(p, beta, ax_b, fv);

    const double error =
        std::max((p.norm() + p_next.norm()) / beta,
                 complementarity(p_next.z, fv));

    KktReport report;
    report.pres =
        std::sqrt(ax_b.squaredNorm() + fv.cwiseMax(0.0).squaredNorm());
    report.dres = inner.certificate_norm;
    report.comp = complementarity(p_next.z, fv);
    report.certificate = inner.certificate;

    if (cfg.trace)
      cfg.trace(OuterTrace{k, beta, x, p, p_next, report,
                           counters - before});

    if (error <= cfg.eps) {
      IalmOutput out;
      out.beta_out = beta;
      out.x_out = std::move(x);
      out.p_out = p_next;
      out.report = std::move(report);
      out.outer_iters = k + 1;
      out.counters = counters;
      return out;
    }
    p = p_next;
    beta *= cfg.sigma;
  }
  throw ConvergenceError(
      "ialm_solve hit max_outer = " + std::to_string(cfg.max_outer),
      x, primal_residual(sub, x));
}

std::int64_t predicted_outer_bound(double p_star_norm, double beta0,
                                   double sigma, double eps) {
  if (!(beta0 > 0.0) || !(sigma > 1.0) || !(eps > 0.0) || p_star_norm < 0.0)
    throw ConfigError(
        "predicted_outer_bound needs beta0 > 0, sigma > 1, eps > 0, p* >= 0");
  const double c =
      std::max({10.0 * p_star_norm * p_star_norm / (beta0 * eps),
                8.0 * p_star_norm / (beta0 * eps), 4.0 / beta0});
  // 1e-12 absorbs round-off when log_sigma(c) lands on an integer.
  const double k = std::ceil(std::log(c) / std::log(sigma) - 1e-12);
  return static_cast<std::int64_t>(std::max(0.0, k)) + 1;
}

}  // namespace hiapem
