// Tests for the staged proximal-point driver: stage bookkeeping against the
// ceil(gamma^s N1) recurrence, multiplier freezing and penalty warm starts
// observed through the subsolver trace, the move-based stop, mode
// equivalences, deterministic replay, and counter conservation.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "hiapem/generators.hpp"
#include "hiapem/hiapem.hpp"
#include "test_support.hpp"

namespace {

using namespace hiapem;

// Subsolver trace split into one group per driver outer iteration; the inner
// iteration index restarts at zero whenever the driver opens a new call.
std::vector<std::vector<OuterTrace>> split_groups(
    const std::vector<OuterTrace>& stream) {
  std::vector<std::vector<OuterTrace>> groups;
  for (const auto& rec : stream) {
    if (rec.k == 0) groups.emplace_back();
    REQUIRE(!groups.empty(), "trace stream must start at k == 0");
    groups.back().push_back(rec);
  }
  return groups;
}

bool duals_equal(const DualPair& a, const DualPair& b) {
  return a.y.size() == b.y.size() && a.z.size() == b.z.size() &&
         (a.y - b.y).norm() == 0.0 && (a.z - b.z).norm() == 0.0;
}

// Re-runs the verifier on a finished summary; the recentered certificate
// stored in the report must reproduce the residual triple and pass at eps.
void expect_verified(const ProblemSpec& problem, const SolveSummary& s,
                     double eps) {
  REQUIRE(s.ok, "run must converge");
  KktCheck check =
      check_eps_kkt(problem, s.x, s.p, s.report.certificate, eps);
  REQUIRE(check.ok, "independent verifier must accept the output");
  REQUIRE_NEAR(check.report.pres, s.report.pres,
               1e-12 * (1.0 + s.report.pres), "reported primal residual");
  REQUIRE_NEAR(check.report.comp, s.report.comp,
               1e-12 * (1.0 + s.report.comp), "reported complementarity");
  REQUIRE(check.report.dres == s.report.dres,
          "dual residual is the norm of the stored certificate");
}

void check_config_validation() {
  const ProblemSpec p = testsupport::tp1();
  const Vec x0 = Vec::Constant(1, 4.0);

  HiapemConfig tiny_rho;
  tiny_rho.rho = 1e-9;
  REQUIRE_THROWS(hiapem_solve(p, x0, tiny_rho), ConfigError,
                 "rho below 1e-8 is rejected");

  HiapemConfig bad_order;
  bad_order.eps = 1e-3;
  bad_order.eps_hat1 = 1e-4;
  bad_order.eps_hat2 = 5e-4;
  REQUIRE_THROWS(hiapem_solve(p, x0, bad_order), ConfigError,
                 "eps_hat2 above eps_hat1 is rejected");

  HiapemConfig hat_above_eps;
  hat_above_eps.eps = 1e-3;
  hat_above_eps.eps_hat1 = 2e-3;
  REQUIRE_THROWS(hiapem_solve(p, x0, hat_above_eps), ConfigError,
                 "eps_hat1 above eps is rejected");

  HiapemConfig shrinking;
  shrinking.gamma = 0.99;
  REQUIRE_THROWS(hiapem_solve(p, x0, shrinking), ConfigError,
                 "stage growth factor below 1 is rejected");

  HiapemConfig no_warmup;
  no_warmup.n0 = 0;
  REQUIRE_THROWS(hiapem_solve(p, x0, no_warmup), ConfigError,
                 "n0 = 0 is rejected");

  HiapemConfig ok;
  REQUIRE_THROWS(hiapem_solve(p, Vec::Zero(2), ok), DimensionError,
                 "start of the wrong length is rejected");
}

// Start at the known optimum: the first subproblem returns next to its
// center, the move test fires immediately, and no stage ever opens.
void check_immediate_stop() {
  const ProblemSpec p = testsupport::tp2();
  HiapemConfig cfg;
  cfg.eps = 1e-3;
  cfg.rho = 1.0;
  cfg.n0 = 1;
  SolveSummary s = hiapem_solve(p, testsupport::tp2_x_star(), cfg);
  REQUIRE(s.outer_iters == 1, "one outer iteration suffices");
  REQUIRE(s.stages == 0, "no stage opens before the move test fires");
  REQUIRE(s.stage_log.empty(), "stage ledger stays empty");
  REQUIRE(s.log.size() == 1 && s.log[0].tag == "ialm" && s.log[0].stage == 0,
          "the single record is a multiplier-phase call");
  REQUIRE(s.log[0].dx_norm <= cfg.eps / (4.0 * cfg.rho),
          "stop requires a move within eps / (4 rho)");
  REQUIRE_NEAR((s.x - testsupport::tp2_x_star()).norm(), 0.0, 1e-3,
               "output stays at the optimum");
  expect_verified(p, s, cfg.eps);
}

// Fixed 20-dimensional instance whose run opens nine stages. The stage
// ledger below was frozen from a converged run and is replayed exactly;
// the recurrence checks tie it back to the configured gamma and n1.
void check_stage_schedule() {
  const LcqpInstance inst = gen_lcqp(20, 4, 1.0, 42);
  HiapemConfig cfg;
  cfg.eps = 1e-4;
  cfg.rho = 1.0;
  const SolveSummary s = hiapem_solve(inst.problem, Vec::Zero(20), cfg);

  REQUIRE(s.ok, "fixture run converges");
  REQUIRE(s.outer_iters == 39, "39 proximal-point iterations");
  REQUIRE(s.stages == 9, "nine stages open");
  REQUIRE(s.log.size() == 39, "one record per outer iteration");
  REQUIRE(s.stage_log.size() == 9, "one ledger row per stage");

  const int expect_k_end[] = {12, 15, 18, 21, 24, 28, 32, 36, 41};
  const int expect_length[] = {2, 3, 3, 3, 3, 4, 4, 4, 5};
  for (int i = 0; i < 9; ++i) {
    const StageRecord& st = s.stage_log[i];
    REQUIRE(st.s == i + 1, "stage indices count from 1");
    REQUIRE(st.k_end == expect_k_end[i], "frozen stage end");
    REQUIRE(st.length == expect_length[i], "frozen stage length");
  }

  // Recurrence: K_1 = n0 + n1, N_{s+1} = ceil(gamma^s n1), K_{s+1} =
  // K_s + N_{s+1}.
  REQUIRE(s.stage_log[0].length == cfg.n1, "first stage has length n1");
  REQUIRE(s.stage_log[0].k_end == cfg.n0 + cfg.n1,
          "first stage ends at n0 + n1");
  for (int i = 1; i < 9; ++i) {
    const int predicted = static_cast<int>(
        std::ceil(std::pow(cfg.gamma, i) * cfg.n1 - 1e-9));
    REQUIRE(s.stage_log[i].length == predicted,
            "stage length follows ceil(gamma^s n1)");
    REQUIRE(s.stage_log[i].k_end ==
                s.stage_log[i - 1].k_end + s.stage_log[i].length,
            "stage ends accumulate the lengths");
  }

  // Tag layout: multiplier phase for k < n0, then each stage is penalty
  // calls closed by one multiplier refresh at k = K_s - 1. The run ends
  // inside stage 9, before that stage's refresh.
  for (int k = 0; k < 39; ++k) {
    const HiapemIterRecord& rec = s.log[k];
    REQUIRE(rec.k == k, "records are consecutively indexed");
    if (k < cfg.n0) {
      REQUIRE(rec.tag == "ialm" && rec.stage == 0,
              "multiplier phase before the first stage");
      continue;
    }
    int stage = 0;
    while (s.stage_log[stage].k_end <= k) ++stage;
    REQUIRE(rec.stage == stage + 1, "record carries its stage index");
    const bool refresh = k == s.stage_log[stage].k_end - 1;
    REQUIRE(rec.tag == (refresh ? "ialm" : "penmm"),
            "penalty calls inside a stage, a multiplier refresh at its end");
  }

  // The warm-start penalty of a stage is the terminal penalty of the
  // multiplier call that opened it.
  REQUIRE(s.stage_log[0].beta_warm == s.log[cfg.n0 - 1].beta_out,
          "stage 1 warm start comes from the last warmup call");
  for (int i = 1; i < 9; ++i)
    REQUIRE(s.stage_log[i].beta_warm ==
                s.log[s.stage_log[i - 1].k_end - 1].beta_out,
            "stage warm start comes from the preceding refresh");

  // Counter conservation across the per-iteration deltas.
  EvalCounters sum;
  for (const auto& rec : s.log) sum += rec.counters_delta;
  REQUIRE(sum == s.counters, "summary counters equal the delta sum");

  // Recentering changes only the certificate: the primal residual and the
  // complementarity transfer unchanged from the last subproblem, and the
  // certificate norm differs by at most the 2 rho dx shift.
  const HiapemIterRecord& last = s.log.back();
  REQUIRE(s.report.pres == last.sub_pres,
          "primal residual transfers from the last subproblem");
  REQUIRE(s.report.comp == last.sub_comp,
          "complementarity transfers from the last subproblem");
  REQUIRE(s.report.dres <=
              last.sub_dres + 2.0 * cfg.rho * last.dx_norm + 1e-12,
          "recentered certificate norm respects the shift bound");
  REQUIRE(last.dx_norm <= cfg.eps / (4.0 * cfg.rho) ||
              (s.report.pres <= cfg.eps && s.report.dres <= cfg.eps &&
               s.report.comp <= cfg.eps),
          "the run ends by the move test or by the residual test");
  expect_verified(inst.problem, s, cfg.eps);
}

// The same fixture observed through the subsolver trace: multiplier calls
// start from zero duals and chain their updates, penalty calls hold the
// frozen stage multiplier in every iteration, and the penalty ledger is
// beta0 sigma^t inside multiplier calls and warm-started across penalty
// calls.
void check_subsolver_trace() {
  const LcqpInstance inst = gen_lcqp(20, 4, 1.0, 42);
  HiapemConfig cfg;
  cfg.eps = 1e-4;
  cfg.rho = 1.0;
  std::vector<OuterTrace> stream;
  cfg.sub_trace = [&](const OuterTrace& t) { stream.push_back(t); };
  const SolveSummary s = hiapem_solve(inst.problem, Vec::Zero(20), cfg);

  HiapemConfig plain = cfg;
  plain.sub_trace = nullptr;
  const SolveSummary bare = hiapem_solve(inst.problem, Vec::Zero(20), plain);
  REQUIRE(bare.log == s.log, "the trace hook does not perturb the run");
  REQUIRE((bare.x - s.x).norm() == 0.0, "traced and plain outputs agree");

  const auto groups = split_groups(stream);
  REQUIRE(groups.size() == s.log.size(),
          "one trace group per driver iteration");

  EvalCounters traced;
  for (const auto& rec : stream) traced += rec.counters_delta;
  REQUIRE(traced == s.counters, "trace deltas add up to the summary");

  const DualPair zeros = DualPair::zeros(inst.problem.affine_rows(),
                                         inst.problem.constraints.count);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const HiapemIterRecord& rec = s.log[i];
    for (std::size_t j = 0; j < g.size(); ++j)
      REQUIRE(g[j].k == static_cast<int>(j),
              "inner iterations are consecutively indexed");
    REQUIRE(g.back().beta == rec.beta_out,
            "the recorded penalty is the last inner iteration's");

    if (rec.tag == "ialm") {
      REQUIRE(duals_equal(g.front().dual_source, zeros),
              "multiplier calls start from zero duals");
      for (std::size_t j = 0; j + 1 < g.size(); ++j)
        REQUIRE(duals_equal(g[j + 1].dual_source, g[j].dual_next),
                "multiplier iterations chain their dual updates");
      double beta = cfg.beta0;
      for (const auto& t : g) {
        REQUIRE(t.beta == beta, "multiplier penalty ledger is beta0 sigma^t");
        beta *= cfg.sigma;
      }
    } else {
      const StageRecord& st = s.stage_log[rec.stage - 1];
      for (const auto& t : g)
        REQUIRE(duals_equal(t.dual_source, st.p_bar),
                "penalty calls hold the frozen stage multiplier");
      REQUIRE(g.front().beta == s.log[i - 1].beta_out,
              "penalty warm-starts at the previous call's terminal value");
      double beta = g.front().beta;
      for (const auto& t : g) {
        REQUIRE(t.beta == beta, "penalty ledger grows by sigma per step");
        beta *= cfg.sigma;
      }
    }
  }
}

void check_constant_gamma_schedule() {
  const LcqpInstance inst = gen_lcqp(20, 4, 1.0, 42);
  HiapemConfig cfg;
  cfg.eps = 1e-4;
  cfg.rho = 1.0;
  cfg.gamma = 1.0;
  cfg.n0 = 2;
  cfg.n1 = 2;
  const SolveSummary s = hiapem_solve(inst.problem, Vec::Zero(20), cfg);
  REQUIRE(s.ok, "constant-gamma run converges");
  REQUIRE(s.stages >= 5, "the short warmup forces many stages");
  for (std::size_t i = 0; i < s.stage_log.size(); ++i) {
    REQUIRE(s.stage_log[i].length == 2,
            "gamma = 1 keeps every stage at length n1");
    REQUIRE(s.stage_log[i].k_end == cfg.n0 + 2 * static_cast<int>(i + 1),
            "stage ends advance by n1");
  }
  expect_verified(inst.problem, s, cfg.eps);
}

void check_replay_determinism() {
  const LcqpInstance inst = gen_lcqp(20, 4, 1.0, 42);
  HiapemConfig cfg;
  cfg.eps = 1e-4;
  cfg.rho = 1.0;
  const SolveSummary a = hiapem_solve(inst.problem, Vec::Zero(20), cfg);
  const SolveSummary b = hiapem_solve(inst.problem, Vec::Zero(20), cfg);
  REQUIRE((a.x - b.x).norm() == 0.0, "replayed output is bitwise equal");
  REQUIRE(a.log == b.log, "replayed iteration log is bitwise equal");
  REQUIRE(a.counters == b.counters, "replayed counters agree");
  REQUIRE(a.stage_log.size() == b.stage_log.size(), "same stage count");
  for (std::size_t i = 0; i < a.stage_log.size(); ++i) {
    const StageRecord &sa = a.stage_log[i], &sb = b.stage_log[i];
    REQUIRE(sa.s == sb.s && sa.k_end == sb.k_end && sa.length == sb.length &&
                sa.beta_warm == sb.beta_warm &&
                duals_equal(sa.p_bar, sb.p_bar),
            "replayed stage ledger is bitwise equal");
  }
}

// With a stage horizon beyond convergence the hybrid driver never leaves
// the multiplier phase, so it must reproduce the pure multiplier mode
// exactly; on a problem that converges inside the warmup the default
// config already does.
void check_mode_equivalence() {
  const LcqpInstance inst = gen_lcqp(20, 4, 1.0, 42);
  HiapemConfig cfg;
  cfg.eps = 1e-4;
  cfg.rho = 1.0;
  cfg.n0 = 1000;
  const SolveSummary h = hiapem_solve(inst.problem, Vec::Zero(20), cfg);
  const SolveSummary m = pure_ialm_solve(inst.problem, Vec::Zero(20), cfg);
  REQUIRE(h.log == m.log, "hybrid with a long warmup matches pure ialm");
  REQUIRE((h.x - m.x).norm() == 0.0, "outputs are bitwise equal");
  REQUIRE(h.stages == 0 && m.stages == 0, "no stage opens in either run");
  REQUIRE(h.stage_log.empty() && m.stage_log.empty(),
          "stage ledgers stay empty");

  const ProblemSpec p = testsupport::tp1();
  const Vec x0 = Vec::Constant(1, 4.0);
  HiapemConfig tcfg;
  tcfg.eps = 1e-3;
  tcfg.rho = 1.0;
  const SolveSummary th = hiapem_solve(p, x0, tcfg);
  const SolveSummary tm = pure_ialm_solve(p, x0, tcfg);
  REQUIRE(th.log == tm.log,
          "a run that converges inside the warmup matches pure ialm");
  REQUIRE((th.x - tm.x).norm() == 0.0, "outputs are bitwise equal");
  REQUIRE_NEAR(th.x[0], testsupport::tp1_x_star(), 5e-3,
               "both land at the optimum");
  expect_verified(p, th, tcfg.eps);
}

// Pure penalty mode: no stage bookkeeping, every call tagged penmm with a
// zero multiplier, penalty warm-started across driver iterations.
void check_pure_penalty() {
  const ProblemSpec p = testsupport::tp1();
  HiapemConfig cfg;
  cfg.eps = 1e-3;
  cfg.rho = 1.0;
  std::vector<OuterTrace> stream;
  cfg.sub_trace = [&](const OuterTrace& t) { stream.push_back(t); };
  const SolveSummary s =
      pure_penalty_solve(p, Vec::Constant(1, 4.0), cfg);
  REQUIRE(s.ok, "penalty run converges");
  REQUIRE(s.stages == 0 && s.stage_log.empty(),
          "pure penalty keeps no stage ledger");
  for (const auto& rec : s.log)
    REQUIRE(rec.tag == "penmm" && rec.stage == 0,
            "every call is a penalty call outside any stage");
  REQUIRE_NEAR(s.x[0], testsupport::tp1_x_star(), 5e-3,
               "output reaches the optimum");
  expect_verified(p, s, cfg.eps);

  const auto groups = split_groups(stream);
  REQUIRE(groups.size() == s.log.size(),
          "one trace group per driver iteration");
  REQUIRE(groups.front().front().beta == cfg.beta0,
          "the first call starts at beta0");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (const auto& t : groups[i]) {
      REQUIRE(t.dual_source.y.size() == 0 && t.dual_source.z.size() == 1 &&
                  t.dual_source.z[0] == 0.0,
              "pure penalty freezes the multiplier at zero");
    }
    if (i > 0)
      REQUIRE(groups[i].front().beta == s.log[i - 1].beta_out,
              "the penalty carries over between driver iterations");
  }
}

// A box-only weakly convex objective: no affine part, no functional
// constraints, so both residual channels stay identically zero while the
// proximal-point loop still has to move the iterate to a stationary point.
void check_unconstrained_instance() {
  ProblemSpec p;
  p.n = 2;
  Mat q(2, 2);
  q << 1.0, 0.0, 0.0, -0.5;
  p.smooth = quadratic_oracle(q, Vec::Constant(2, 0.3), 1.0);
  p.nonsmooth = box_prox(2, -2.0, 2.0);
  p.rho = 0.5;
  HiapemConfig cfg;
  cfg.eps = 1e-3;
  cfg.rho = 0.5;

  const SolveSummary pen = pure_penalty_solve(p, Vec::Zero(2), cfg);
  const SolveSummary hyb = hiapem_solve(p, Vec::Zero(2), cfg);
  for (const SolveSummary* s : {&pen, &hyb}) {
    REQUIRE(s->ok, "box-only run converges");
    for (const auto& rec : s->log)
      REQUIRE(rec.sub_pres == 0.0 && rec.sub_comp == 0.0,
              "no constraints means zero feasibility residuals");
    REQUIRE_NEAR(s->x[0], -0.3, 2e-3, "free coordinate reaches -0.3");
    REQUIRE(s->x[1] == -2.0, "concave coordinate pins to the box face");
    expect_verified(p, *s, cfg.eps);
  }
}

void check_iteration_cap() {
  const ProblemSpec p = testsupport::tp1();
  HiapemConfig cfg;
  cfg.eps = 1e-3;
  cfg.rho = 1.0;
  cfg.max_total_outer = 1;
  try {
    hiapem_solve(p, Vec::Constant(1, 4.0), cfg);
    REQUIRE(false, "one outer iteration cannot finish from x = 4");
  } catch (const ConvergenceError& err) {
    REQUIRE(err.best_x.size() == 1, "the error carries the last iterate");
  }
}

}  // namespace

int main() {
  check_config_validation();
  check_immediate_stop();
  check_stage_schedule();
  check_subsolver_trace();
  check_constant_gamma_schedule();
  check_replay_determinism();
  check_mode_equivalence();
  check_pure_penalty();
  check_unconstrained_instance();
  check_iteration_cap();
  std::puts("test_driver: all checks passed");
  return 0;
}
