#include "hiapem/penmm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hiapem {

void PenmmConfig::validate() const {
  if (!(eps > 0.0)) throw ConfigError("PenmmConfig.eps must be positive");
  if (!(beta_init > 0.0))
    throw ConfigError("PenmmConfig.beta_init must be positive");
  if (!(sigma > 1.0)) throw ConfigError("PenmmConfig.sigma must exceed 1");
  if (!(rho > 0.0)) throw ConfigError("PenmmConfig.rho must be positive");
  if (max_outer <= 0)
    throw ConfigError("PenmmConfig.max_outer must be positive");
}

PenmmOutput penmm_solve(const ProblemSpec& sub, const Vec& center,
                        const DualPair& p_bar, const PenmmConfig& cfg) {
  cfg.validate();
  if (sub.strong_convexity <= 0.0)
    throw ConfigError("penmm_solve needs a strongly convex subproblem");
  if (center.size() != sub.n)
    throw DimensionError("center has length " +
                         std::to_string(center.size()) +
                         ", subproblem dimension is " + std::to_string(sub.n));
  if (p_bar.y.size() != sub.affine_rows() ||
      p_bar.z.size() != sub.constraints.count)
    throw DimensionError("p_bar does not match the constraint blocks");
  for (Index i = 0; i < p_bar.z.size(); ++i)
    if (p_bar.z[i] < 0.0)
      throw DualFeasibilityError("p_bar.z[" + std::to_string(i) + "] < 0");

  const double eps_bar = cfg.eps * std::min(1.0, std::sqrt(cfg.rho));
  const auto meta =
      cfg.seed_l_min_from_estimate ? try_collect_metadata(sub) : std::nullopt;

  EvalCounters counters;
  double beta = cfg.beta_init;
  Vec x = center;

  for (int k = 0; k < cfg.max_outer; ++k) {
    ApgConfig apg = cfg.apg;
    apg.mu = cfg.rho;
    apg.eps = eps_bar;
    if (meta)
      apg.l_min =
          std::max(apg.mu, smoothness_estimate(*meta, p_bar.z, beta, 0.0));
    else
      apg.l_min = std::max(apg.mu, apg.l_min);

    const EvalCounters before = counters;
    AlContext ctx(sub, beta, p_bar, &counters);
    ApgResult inner = adap_apg(al_smooth_oracle(ctx), sub.nonsmooth, x, apg,
                               counters);
    x = inner.x;

    const Vec fv = sub.constraints.count > 0 ? sub.constraints.values(x)
                                             : Vec(0);
    const Vec ax_b =
        sub.affine ? Vec(sub.affine->apply(x) - sub.affine->rhs) : Vec(0);
    // One-shot multiplier recomputation, always from the frozen p_bar.
    const DualPair p_next = dual_update(p_bar, beta, ax_b, fv);

    KktReport report;
    report.pres =
        std::sqrt(ax_b.squaredNorm() + fv.cwiseMax(0.0).squaredNorm());
    report.dres = inner.certificate_norm;
    report.comp = complementarity(p_next.z, fv);
    report.certificate = inner.certificate;

    if (cfg.trace)
      cfg.trace(OuterTrace{k, beta, x, p_bar, p_next, report,
                           counters - before});

    if (report.pres <= cfg.eps && report.dres <= cfg.eps &&
        report.comp <= cfg.eps) {
      PenmmOutput out;
      out.beta_out = beta;
      out.x_out = std::move(x);
      out.p_out = p_next;
      out.report = std::move(report);
      out.outer_iters = k + 1;
      out.counters = counters;
      return out;
    }
    beta *= cfg.sigma;
  }
  throw ConvergenceError(
      "penmm_solve hit max_outer = " + std::to_string(cfg.max_outer),
      x, primal_residual(sub, x));
}

double predicted_beta_bound(double p_star_norm, double p_gap_norm,
                            double eps) {
  if (!(eps > 0.0) || p_star_norm < 0.0 || p_gap_norm < 0.0)
    throw ConfigError(
        "predicted_beta_bound needs eps > 0 and nonnegative norms");
  return std::max({4.0 * (p_star_norm * p_star_norm +
                          p_gap_norm * p_gap_norm) / eps,
                   4.0 * p_gap_norm / eps, 8.0});
}

}  // namespace hiapem
