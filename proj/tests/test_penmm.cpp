// Checks for the penalty loop with a frozen multiplier estimate: one-shot
// dual recomputation, the immutability of the estimate across iterations,
// the penalty crossing bound, and termination behavior at both a good and
// a zero estimate.

#include <cmath>
#include <vector>

#include "hiapem/penmm.hpp"
#include "test_support.hpp"

using namespace hiapem;
using testsupport::tp1;

namespace {

PenmmConfig base_config(double eps) {
  PenmmConfig cfg;
  cfg.eps = eps;
  cfg.beta_init = 0.01;
  cfg.sigma = 3.0;
  cfg.rho = 1.0;
  cfg.apg.l_min = 1.0;
  return cfg;
}

void check_predicted_beta_bound() {
  REQUIRE_NEAR(predicted_beta_bound(1.0, 1.0, 1e-3), 8000.0, 0.0,
               "4 (p*^2 + gap^2) / eps dominates");
  REQUIRE_NEAR(predicted_beta_bound(1.0, 0.0, 1.0), 8.0, 0.0,
               "floor term at an exact estimate");
  REQUIRE_NEAR(predicted_beta_bound(0.0, 0.0, 1e-3), 8.0, 0.0,
               "floor term at zero norms");
  REQUIRE_THROWS(predicted_beta_bound(1.0, 1.0, 0.0), ConfigError,
                 "eps = 0 rejected");
}

void check_exact_estimate() {
  // With the closed-form multiplier frozen in, the first iteration at a
  // moderate penalty already satisfies the residual triple.
  ProblemSpec sub = tp1();
  DualPair p_bar{Vec(0), Vec(1)};
  p_bar.z << testsupport::tp1_z_star();
  PenmmConfig cfg = base_config(1e-3);
  cfg.beta_init = 1.0;
  PenmmOutput out =
      penmm_solve(sub, Vec::Constant(1, 4.0), p_bar, cfg);
  REQUIRE(out.outer_iters == 1, "one iteration at the exact estimate");
  REQUIRE_NEAR(out.beta_out, 1.0, 0.0, "penalty never grew");
  REQUIRE_NEAR(out.x_out[0], 1.0, 1e-3, "primal solution");
  KktCheck check = check_eps_kkt(sub, out.x_out, out.p_out,
                                 out.report.certificate, cfg.eps);
  REQUIRE(check.ok, "independent verifier confirms the output");
}

void check_zero_estimate() {
  // A zero estimate forces the penalty to do all the work; it must cross
  // the predicted level within one growth step.
  ProblemSpec sub = tp1();
  DualPair p_bar = DualPair::zeros(0, 1);
  PenmmConfig cfg = base_config(1e-3);
  std::vector<OuterTrace> trace;
  cfg.trace = [&trace](const OuterTrace& t) { trace.push_back(t); };
  PenmmOutput out =
      penmm_solve(sub, Vec::Constant(1, 4.0), p_bar, cfg);

  const double beta_bar = predicted_beta_bound(1.0, 1.0, cfg.eps);
  REQUIRE(out.beta_out <= cfg.sigma * beta_bar,
          "penalty crosses the predicted level within one step");
  REQUIRE_NEAR(out.x_out[0], 1.0, 2e-3, "primal solution");
  REQUIRE(out.outer_iters >= 2, "a zero estimate needs penalty growth");

  // Ledger: beta_k = beta_init * sigma^k, and the accepted penalty is the
  // last trace entry.
  double beta = cfg.beta_init;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    REQUIRE(trace[k].beta == beta, "geometric penalty ledger");
    beta *= cfg.sigma;
  }
  REQUIRE(out.beta_out == trace.back().beta,
          "output penalty is the accepted iteration's");

  // Frozen estimate: every iteration reads the same p_bar, and the
  // recomputed pair comes from p_bar rather than the previous iteration.
  for (const OuterTrace& t : trace) {
    REQUIRE(t.dual_source.z.size() == 1 && t.dual_source.z[0] == 0.0,
            "dual source is the frozen estimate");
    const Vec fv = sub.constraints.values(t.x);
    DualPair expect = dual_update(p_bar, t.beta, Vec(0), fv);
    REQUIRE((t.dual_next.z - expect.z).norm() == 0.0,
            "one-shot recomputation from the frozen estimate");
  }
}

void check_at_least_one_iteration() {
  // Starting at the solution with the exact estimate still runs one inner
  // solve; certification only exists after it.
  ProblemSpec sub = tp1();
  DualPair p_bar{Vec(0), Vec(1)};
  p_bar.z << 1.0;
  PenmmConfig cfg = base_config(1e-3);
  cfg.beta_init = 1.0;
  PenmmOutput out = penmm_solve(sub, Vec::Constant(1, 1.0), p_bar, cfg);
  REQUIRE(out.outer_iters == 1, "exactly one iteration from the solution");
}

void check_unconstrained_degenerate() {
  // No affine rows and no functional constraints: the first inner solve
  // is already the answer and the dual blocks stay empty.
  ProblemSpec sub;
  sub.n = 2;
  sub.smooth.value = [](const Vec& x) {
    return 0.5 * (x - Vec::Constant(2, 1.0)).squaredNorm();
  };
  sub.smooth.gradient = [](const Vec& x) {
    return Vec(x - Vec::Constant(2, 1.0));
  };
  sub.smooth.lipschitz_hint = 1.0;
  sub.nonsmooth = box_prox(2, -5.0, 5.0);
  sub.rho = 1.0;
  sub.strong_convexity = 1.0;

  PenmmConfig cfg = base_config(1e-3);
  PenmmOutput out =
      penmm_solve(sub, Vec::Zero(2), DualPair::zeros(0, 0), cfg);
  REQUIRE(out.outer_iters == 1, "one iteration without constraints");
  REQUIRE((out.x_out - Vec::Constant(2, 1.0)).norm() <= 1e-3,
          "unconstrained minimum");
  REQUIRE_NEAR(out.report.pres, 0.0, 0.0, "no residual blocks");
  REQUIRE_NEAR(out.report.comp, 0.0, 0.0, "no complementarity terms");
}

void check_validation() {
  ProblemSpec sub = tp1();
  PenmmConfig cfg = base_config(1e-3);
  cfg.beta_init = 0.0;
  REQUIRE_THROWS(cfg.validate(), ConfigError, "beta_init = 0 rejected");

  cfg = base_config(1e-3);
  DualPair bad = DualPair::zeros(0, 1);
  bad.z << -1.0;
  REQUIRE_THROWS(penmm_solve(sub, Vec::Zero(1), bad, cfg),
                 DualFeasibilityError, "negative estimate rejected");
  REQUIRE_THROWS(
      penmm_solve(sub, Vec::Zero(1), DualPair::zeros(1, 1), cfg),
      DimensionError, "estimate shape must match the blocks");

  cfg.max_outer = 1;
  cfg.beta_init = 1e-6;
  REQUIRE_THROWS(
      penmm_solve(sub, Vec::Constant(1, 4.0), DualPair::zeros(0, 1), cfg),
      ConvergenceError, "exhausted outer budget must throw");
}

}  // namespace

int main() {
  check_predicted_beta_bound();
  check_exact_estimate();
  check_zero_estimate();
  check_at_least_one_iteration();
  check_unconstrained_degenerate();
  check_validation();
  std::cout << "test_penmm: all checks passed\n";
  return 0;
}
