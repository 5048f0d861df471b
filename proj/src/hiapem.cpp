#include "hiapem/hiapem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hiapem {

void HiapemConfig::validate() const {
  if (!(eps > 0.0)) throw ConfigError("HiapemConfig.eps must be positive");
  if (!(rho >= 1e-8))
    throw ConfigError(
        "HiapemConfig.rho below 1e-8; the move-based stop radius eps/(4 rho) "
        "degenerates. Solve the problem as a single convex subproblem "
        "instead.");
  if (!(beta0 > 0.0)) throw ConfigError("HiapemConfig.beta0 must be positive");
  if (!(sigma > 1.0)) throw ConfigError("HiapemConfig.sigma must exceed 1");
  if (!(gamma >= 1.0))
    throw ConfigError("HiapemConfig.gamma must be at least 1");
  if (n0 < 1) throw ConfigError("HiapemConfig.n0 must be at least 1");
  if (n1 < 1) throw ConfigError("HiapemConfig.n1 must be at least 1");
  if (!(gamma1 > 1.0)) throw ConfigError("HiapemConfig.gamma1 must exceed 1");
  if (!(gamma2 >= 1.0 && gamma2 <= 2.0 * gamma1))
    throw ConfigError("HiapemConfig.gamma2 must lie in [1, 2 gamma1]");
  if (l_min && !(*l_min > 0.0))
    throw ConfigError("HiapemConfig.l_min must be positive when set");
  if (sub_max_outer <= 0 || max_total_outer <= 0 || apg_max_iters <= 0)
    throw ConfigError("HiapemConfig iteration caps must be positive");
  const double eh1 = eps_hat1.value_or(eps);
  const double eh2 = eps_hat2.value_or(
      eps / (2.0 * std::sqrt(2.0)) * std::min(1.0, 1.0 / std::sqrt(rho)));
  if (!(eh2 > 0.0 && eh2 <= eh1 && eh1 <= eps))
    throw ConfigError("HiapemConfig needs 0 < eps_hat2 <= eps_hat1 <= eps");
}

bool operator==(const HiapemIterRecord& a, const HiapemIterRecord& b) {
  return a.k == b.k && a.tag == b.tag && a.stage == b.stage &&
         a.beta_out == b.beta_out && a.dx_norm == b.dx_norm &&
         a.x_norm == b.x_norm && a.sub_pres == b.sub_pres &&
         a.sub_dres == b.sub_dres && a.sub_comp == b.sub_comp &&
         a.counters_delta == b.counters_delta;
}

namespace {

struct SubOutcome {
  double beta_out = 0.0;
  Vec x_out;
  DualPair p_out;
  KktReport sub_report;
  int outer_iters = 0;
  EvalCounters counters;
};

/// Residual triple for the original problem, obtained by removing the
/// proximal shift from the subproblem certificate.
KktReport recenter_report(const KktReport& sub_report, double rho,
                          const Vec& x_new, const Vec& x_center) {
  KktReport global = sub_report;
  global.certificate =
      sub_report.certificate - 2.0 * rho * (x_new - x_center);
  global.dres = global.certificate.norm();
  return global;
}

class Driver {
 public:
  Driver(const ProblemSpec& problem, const Vec& x_init,
         const HiapemConfig& cfg, SolveMode mode)
      : problem_(problem), cfg_(cfg), mode_(mode) {
    cfg_.validate();
    if (x_init.size() != problem.n)
      throw DimensionError("x_init has length " +
                           std::to_string(x_init.size()) +
                           ", problem dimension is " +
                           std::to_string(problem.n));
    eh1_ = cfg.eps_hat1.value_or(cfg.eps);
    eh2_ = cfg.eps_hat2.value_or(cfg.eps / (2.0 * std::sqrt(2.0)) *
                                 std::min(1.0, 1.0 / std::sqrt(cfg.rho)));
    l_min_ = cfg.l_min.value_or(cfg.rho);
    stop_radius_ = cfg.eps / (4.0 * cfg.rho);
    x_ = problem.nonsmooth.project(x_init);
  }

  SolveSummary run() {
    const int k0 = mode_ == SolveMode::hybrid ? cfg_.n0
                   : mode_ == SolveMode::pure_ialm
                       ? std::numeric_limits<int>::max()
                       : 0;

    // Multiplier phase: k = 0 .. k0-1, each subproblem via ialm_solve.
    while (k_ < k0) {
      guard_total();
      SubOutcome out = solve_ialm();
      const bool stop = absorb(out, "ialm");
      if (stop) return finish();
      ++k_;
    }

    // Stage phase. The frozen multiplier and warm penalty come from the
    // latest ialm call; stage s ends with an ialm refresh at k = K_s - 1.
    // pure_penalty skips the stage bookkeeping and starts its penalty at
    // beta0.
    int big_k = 0;
    if (mode_ == SolveMode::hybrid) {
      stage_ = 1;
      big_k = k_ + cfg_.n1;
      p_bar_ = last_.p_out;
      beta_warm_ = last_.beta_out;
      summary_.stage_log.push_back(
          StageRecord{stage_, big_k, cfg_.n1, beta_warm_, p_bar_});
    } else {
      beta_warm_ = cfg_.beta0;
    }

    while (true) {
      guard_total();
      if (global_ok()) return finish();
      if (mode_ == SolveMode::hybrid && k_ == big_k - 1) {
        SubOutcome out = solve_ialm();
        const bool stop = absorb(out, "ialm");
        if (stop) return finish();
        k_ = big_k;
        const int n_next = static_cast<int>(
            std::ceil(std::pow(cfg_.gamma, stage_) * cfg_.n1 - 1e-9));
        big_k += n_next;
        ++stage_;
        p_bar_ = last_.p_out;
        beta_warm_ = last_.beta_out;
        summary_.stage_log.push_back(
            StageRecord{stage_, big_k, n_next, beta_warm_, p_bar_});
      } else {
        SubOutcome out = solve_penmm();
        const bool stop = absorb(out, "penmm");
        if (stop) return finish();
        beta_warm_ = out.beta_out;
        ++k_;
      }
    }
  }

 private:
  void guard_total() {
    if (k_ >= cfg_.max_total_outer)
      throw ConvergenceError("driver hit max_total_outer = " +
                                 std::to_string(cfg_.max_total_outer),
                             x_, last_global_.pres);
  }

  /// Initial point handed to a subproblem solver: the one-step linear
  /// extrapolation of the proximal-point path, projected onto dom(h).
  /// The extrapolation cancels the first-order effect of the moving
  /// center on the subproblem optimum; the center itself stays at x_.
  Vec sub_start() const {
    if (x_prev_.size() == 0) return x_;
    return problem_.nonsmooth.project(2.0 * x_ - x_prev_);
  }

  SubOutcome solve_ialm() {
    ProblemSpec sub = build_pp_subproblem(problem_, x_);
    IalmConfig icfg;
    icfg.eps = eh1_ / 2.0;
    icfg.beta0 = cfg_.beta0;
    icfg.sigma = cfg_.sigma;
    icfg.rho = cfg_.rho;
    icfg.apg.l_min = l_min_;
    icfg.apg.gamma1 = cfg_.gamma1;
    icfg.apg.gamma2 = cfg_.gamma2;
    icfg.apg.max_iters = cfg_.apg_max_iters;
    icfg.max_outer = cfg_.sub_max_outer;
    icfg.seed_l_min_from_estimate = cfg_.seed_l_min_from_estimate;
    icfg.trace = cfg_.sub_trace;
    IalmOutput out = ialm_solve(sub, sub_start(), icfg);
    return SubOutcome{out.beta_out,    std::move(out.x_out),
                      std::move(out.p_out), std::move(out.report),
                      out.outer_iters, out.counters};
  }

  SubOutcome solve_penmm() {
    ProblemSpec sub = build_pp_subproblem(problem_, x_);
    const DualPair p_bar =
        mode_ == SolveMode::pure_penalty
            ? DualPair::zeros(problem_.affine_rows(),
                              problem_.constraints.count)
            : p_bar_;
    PenmmConfig pcfg;
    pcfg.eps = eh2_ / 2.0;
    pcfg.beta_init = beta_warm_;
    pcfg.sigma = cfg_.sigma;
    pcfg.rho = cfg_.rho;
    pcfg.apg.l_min = l_min_;
    pcfg.apg.gamma1 = cfg_.gamma1;
    pcfg.apg.gamma2 = cfg_.gamma2;
    pcfg.apg.max_iters = cfg_.apg_max_iters;
    pcfg.max_outer = cfg_.sub_max_outer;
    pcfg.seed_l_min_from_estimate = cfg_.seed_l_min_from_estimate;
    pcfg.trace = cfg_.sub_trace;
    PenmmOutput out = penmm_solve(sub, sub_start(), p_bar, pcfg);
    return SubOutcome{out.beta_out,    std::move(out.x_out),
                      std::move(out.p_out), std::move(out.report),
                      out.outer_iters, out.counters};
  }

  /// Folds one subproblem outcome into the running state and reports
  /// whether the move-based stop test fired.
  bool absorb(SubOutcome& out, const char* tag) {
    const double dx = (out.x_out - x_).norm();
    last_global_ = recenter_report(out.sub_report, cfg_.rho, out.x_out, x_);

    HiapemIterRecord rec;
    rec.k = k_;
    rec.tag = tag;
    rec.stage = stage_;
    rec.beta_out = out.beta_out;
    rec.dx_norm = dx;
    rec.x_norm = out.x_out.norm();
    rec.sub_pres = out.sub_report.pres;
    rec.sub_dres = out.sub_report.dres;
    rec.sub_comp = out.sub_report.comp;
    rec.counters_delta = out.counters;
    summary_.log.push_back(std::move(rec));
    summary_.counters += out.counters;

    x_prev_ = std::move(x_);
    x_ = std::move(out.x_out);
    last_ = SubOutcome{out.beta_out, Vec(), std::move(out.p_out),
                       std::move(out.sub_report), out.outer_iters,
                       out.counters};
    return dx <= stop_radius_;
  }

  bool global_ok() const {
    return last_global_.certificate.size() == problem_.n &&
           last_global_.pres <= cfg_.eps && last_global_.dres <= cfg_.eps &&
           last_global_.comp <= cfg_.eps;
  }

  SolveSummary finish() {
    summary_.x = x_;
    summary_.p = last_.p_out;
    summary_.report = last_global_;
    summary_.outer_iters = static_cast<int>(summary_.log.size());
    summary_.stages = stage_;
    summary_.ok = last_global_.pres <= cfg_.eps &&
                  last_global_.dres <= cfg_.eps &&
                  last_global_.comp <= cfg_.eps;
    return std::move(summary_);
  }

  const ProblemSpec& problem_;
  HiapemConfig cfg_;
  SolveMode mode_;
  double eh1_ = 0.0, eh2_ = 0.0, l_min_ = 0.0, stop_radius_ = 0.0;

  Vec x_;
  Vec x_prev_;  // empty until the first subproblem completes
  int k_ = 0;
  int stage_ = 0;
  double beta_warm_ = 0.0;
  DualPair p_bar_;
  SubOutcome last_;
  KktReport last_global_;
  SolveSummary summary_;
};

}  // namespace

SolveSummary hiapem_solve(const ProblemSpec& problem, const Vec& x_init,
                          const HiapemConfig& cfg) {
  HiapemConfig c = cfg;
  c.mode = SolveMode::hybrid;
  return Driver(problem, x_init, c, SolveMode::hybrid).run();
}

SolveSummary pure_ialm_solve(const ProblemSpec& problem, const Vec& x_init,
                             const HiapemConfig& cfg) {
  HiapemConfig c = cfg;
  c.mode = SolveMode::pure_ialm;
  return Driver(problem, x_init, c, SolveMode::pure_ialm).run();
}

SolveSummary pure_penalty_solve(const ProblemSpec& problem,
                                const Vec& x_init, const HiapemConfig& cfg) {
  HiapemConfig c = cfg;
  c.mode = SolveMode::pure_penalty;
  return Driver(problem, x_init, c, SolveMode::pure_penalty).run();
}

}  // namespace hiapem
