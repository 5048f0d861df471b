#pragma once

#include "hiapem/ialm.hpp"
#include "hiapem/penmm.hpp"

#include <string>
#include <vector>

namespace hiapem {

enum class SolveMode {
  hybrid,        ///< staged multiplier/penalty alternation
  pure_ialm,     ///< every subproblem solved by ialm_solve
  pure_penalty,  ///< every subproblem solved by penmm_solve with p_bar = 0
};

/// Driver settings. eps_hat1/eps_hat2 are the target levels handed to the
/// multiplier and penalty subsolvers (halved internally); unset they
/// resolve to eps and (eps / (2 sqrt(2))) * min(1, 1 / sqrt(rho)). l_min
/// unset resolves to rho.
struct HiapemConfig {
  double eps = 1e-3;
  std::optional<double> eps_hat1;
  std::optional<double> eps_hat2;
  double beta0 = 0.01;
  double sigma = 3.0;
  double gamma = 1.1;  ///< stage length growth factor
  int n0 = 10;         ///< iALM calls before the first stage
  int n1 = 2;          ///< length of the first stage
  double rho = 1.0;    ///< weak convexity modulus of the objective
  double gamma1 = 2.0;
  double gamma2 = 1.25;
  std::optional<double> l_min;
  std::int64_t apg_max_iters = 1'000'000;
  int sub_max_outer = 60;      ///< outer cap inside each ialm/penmm call
  int max_total_outer = 4000;  ///< cap on proximal-point iterations
  SolveMode mode = SolveMode::hybrid;
  bool seed_l_min_from_estimate = true;
  OuterTraceFn sub_trace;  ///< forwarded into every ialm/penmm call

  void validate() const;
};

/// One proximal-point iteration as recorded in SolveSummary::log.
struct HiapemIterRecord {
  int k = 0;           ///< global outer index
  std::string tag;     ///< "ialm" or "penmm"
  int stage = 0;       ///< 0 before the first stage
  double beta_out = 0.0;
  double dx_norm = 0.0;
  double x_norm = 0.0;
  double sub_pres = 0.0;
  double sub_dres = 0.0;
  double sub_comp = 0.0;
  EvalCounters counters_delta;
};

bool operator==(const HiapemIterRecord& a, const HiapemIterRecord& b);

/// Bookkeeping of one stage: its index, its end K_s, its length N_s, the
/// warm-start penalty of its first penalty call, and the multiplier
/// estimate frozen for the whole stage.
struct StageRecord {
  int s = 0;
  int k_end = 0;
  int length = 0;
  double beta_warm = 0.0;
  DualPair p_bar;
};

/// Final state of a driver run. `report` holds the residual triple of the
/// original problem at (x, p); its certificate is the recentered
/// subgradient v - 2 rho (x - x_prev). `counters` equals the sum of the
/// per-iteration deltas in `log`.
struct SolveSummary {
  Vec x;
  DualPair p;
  KktReport report;
  EvalCounters counters;
  int outer_iters = 0;
  int stages = 0;
  bool ok = false;
  std::vector<HiapemIterRecord> log;
  std::vector<StageRecord> stage_log;
};

/// Hybrid proximal-point driver.
///
/// Repeatedly builds the subproblem regularized at the current iterate and
/// solves it inexactly, by ialm_solve for the first n0 iterations and at
/// the close of every stage, by penmm_solve (multiplier frozen per stage,
/// penalty warm-started through the stage ledger) in between. Stage s+1 is
/// longer than stage s by the factor gamma. The run stops when an iterate
/// moves less than eps / (4 rho), which converts the subproblem residuals
/// into residuals for the original problem at level eps, or earlier when
/// the recentered certificate of the last subproblem already passes the
/// eps test. The start is projected onto dom(h).
///
/// Throws ConfigError for rho below 1e-8 and ConvergenceError (carrying
/// the last iterate) when max_total_outer runs out.
SolveSummary hiapem_solve(const ProblemSpec& problem, const Vec& x_init,
                          const HiapemConfig& cfg);

/// Same proximal-point loop with every subproblem solved by ialm_solve.
SolveSummary pure_ialm_solve(const ProblemSpec& problem, const Vec& x_init,
                             const HiapemConfig& cfg);

/// Same loop with every subproblem solved by penmm_solve at p_bar = 0 and
/// the penalty warm-started across iterations.
SolveSummary pure_penalty_solve(const ProblemSpec& problem,
                                const Vec& x_init, const HiapemConfig& cfg);

}  // namespace hiapem
