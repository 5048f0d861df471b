#include "hiapem/adap_apg.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hiapem {

namespace {

constexpr double kTrialCap = 1e12;

// Width of the band in which a value comparison is undecidable: once the
// step shrinks to rounding scale, the two sides agree up to cancellation
// noise of order eps_mach * |value|, and the outcome of the exact
// comparison carries no information about the trial constant.
double noise_band(double a, double b) {
  return 1e-12 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// Descent test for one trial constant. The value form
//   G(x_next) <= G(y) + <grad_y, d> + (l/2) ||d||^2,    d = x_next - y,
// decides whenever its two sides differ by more than the noise band.
// Inside the band the call falls back to the secant form
//   <grad(x_next) - grad_y, d> <= l ||d||^2,
// which is computed from products of small quantities and keeps full
// relative precision at rounding-scale steps, so its slack is purely
// relative. The two forms coincide for quadratic G; for convex G the
// secant form is the more conservative one. `grad_x` supplies the gradient
// at x_next on demand; only the fallback needs it.
bool descent_ok(const Vec& y, const Vec& grad_y, double gy, const Vec& x_next,
                double gx, double l,
                const std::function<const Vec&()>& grad_x) {
  const Vec d = x_next - y;
  const double dsq = d.squaredNorm();
  const double rhs = gy + grad_y.dot(d) + 0.5 * l * dsq;
  if (gx <= rhs) return true;
  if (gx - rhs > noise_band(gx, rhs)) return false;
  const double secant = (grad_x() - grad_y).dot(d);
  return secant <= l * dsq * (1.0 + 1e-9);
}

// Value and gradient at one point, through the fused oracle entry when it
// is set.
double eval_both(const SmoothOracle& g, const Vec& x, Vec& grad) {
  if (g.value_and_gradient) return g.value_and_gradient(x, grad);
  const double v = g.value(x);
  grad = g.gradient(x);
  return v;
}

}  // namespace

void ApgConfig::validate() const {
  if (!(mu > 0.0)) throw ConfigError("ApgConfig.mu must be positive");
  if (!(eps > 0.0)) throw ConfigError("ApgConfig.eps must be positive");
  if (!(l_min >= mu))
    throw ConfigError("ApgConfig.l_min must be at least mu");
  if (!(gamma1 > 1.0)) throw ConfigError("ApgConfig.gamma1 must exceed 1");
  if (!(gamma2 >= 1.0 && gamma2 <= 2.0 * gamma1))
    throw ConfigError("ApgConfig.gamma2 must lie in [1, 2 gamma1]");
  if (max_iters <= 0) throw ConfigError("ApgConfig.max_iters must be positive");
}

Vec prox_grad_step(const Vec& grad_y, const Vec& y, double lip,
                   const ProxOracle& h, EvalCounters* counters) {
  if (!(lip > 0.0)) throw ConfigError("prox_grad_step needs lip > 0");
  if (counters) ++counters->n_prox;
  return h.prox(y - grad_y / lip, 1.0 / lip);
}

LineSearchStep accel_line_search(const SmoothOracle& g, const ProxOracle& h,
                                 const Vec& x_k, const Vec& x_prev,
                                 double l_k, double mu, double alpha_prev,
                                 double gamma1, EvalCounters* counters) {
  double l = std::max(l_k / gamma1, mu);  // keeps alpha <= 1 below
  const Vec dx = x_k - x_prev;
  const bool fused = static_cast<bool>(g.value_and_gradient);
  while (true) {
    const double alpha = std::sqrt(mu / l);
    const double w = alpha * (1.0 - alpha_prev) / (alpha_prev * (1.0 + alpha));
    Vec y = x_k + w * dx;
    Vec grad_y;
    const double gy = eval_both(g, y, grad_y);
    Vec x_next = prox_grad_step(grad_y, y, l, h, counters);
    Vec grad_x;
    double gx;
    bool have_grad_x = fused;
    if (fused)
      gx = g.value_and_gradient(x_next, grad_x);
    else
      gx = g.value(x_next);
    auto grad_x_ref = [&]() -> const Vec& {
      if (!have_grad_x) {
        grad_x = g.gradient(x_next);
        have_grad_x = true;
      }
      return grad_x;
    };
    if (descent_ok(y, grad_y, gy, x_next, gx, l, grad_x_ref)) {
      grad_x_ref();
      return LineSearchStep{std::move(x_next), std::move(grad_x), l, alpha,
                            std::move(y),      std::move(grad_y)};
    }
    l *= gamma1;
    if (l > kTrialCap)
      throw LineSearchError(
          "backtracking trial constant passed 1e12 without acceptance");
  }
}

ApgResult adap_apg(const SmoothOracle& g, const ProxOracle& h,
                   const Vec& x_init, const ApgConfig& cfg,
                   EvalCounters& counters) {
  cfg.validate();
  const std::int64_t fg_start = counters.total_fg();

  // Preprocessing: backtrack a plain proximal gradient step from x_init,
  // first trial at l_min.
  Vec grad_init;
  const double f_init = eval_both(g, x_init, grad_init);
  double l0 = cfg.l_min;
  Vec x0;
  while (true) {
    x0 = prox_grad_step(grad_init, x_init, l0, h, &counters);
    const double gx0 = g.value(x0);
    Vec grad_x0;
    bool have_grad_x0 = false;
    auto grad_x0_ref = [&]() -> const Vec& {
      if (!have_grad_x0) {
        grad_x0 = g.gradient(x0);
        have_grad_x0 = true;
      }
      return grad_x0;
    };
    if (descent_ok(x_init, grad_init, f_init, x0, gx0, l0, grad_x0_ref))
      break;
    l0 *= cfg.gamma1;
    if (l0 > kTrialCap)
      throw LineSearchError(
          "preprocessing trial constant passed 1e12 without acceptance");
  }

  Vec x_prev = x0;
  Vec x = x0;
  double alpha_prev = 1.0;  // cancels the momentum term on the first step
  double l_k = l0;

  Vec best_x = x;
  double best_norm = std::numeric_limits<double>::infinity();

  for (std::int64_t k = 0; k < cfg.max_iters; ++k) {
    LineSearchStep st = accel_line_search(g, h, x, x_prev, l_k, cfg.mu,
                                          alpha_prev, cfg.gamma1, &counters);
    Vec v = st.accepted_l * (st.y - st.x_next) + st.grad_x_next - st.grad_y;
    const double vn = v.norm();

    x_prev = std::move(x);
    x = st.x_next;
    alpha_prev = st.alpha;
    l_k = std::max(cfg.l_min, st.accepted_l / cfg.gamma2);

    if (vn < best_norm) {
      best_norm = vn;
      best_x = x;
    }
    if (vn <= cfg.eps) {
      ApgResult out;
      out.x = std::move(x);
      out.certificate = std::move(v);
      out.certificate_norm = vn;
      out.iters = k + 1;
      out.evals = counters.total_fg() - fg_start;
      return out;
    }
  }
  throw ConvergenceError(
      "adap_apg hit max_iters = " + std::to_string(cfg.max_iters) +
          " with best certificate norm " + std::to_string(best_norm) +
          " (is mu an overestimate?)",
      best_x, best_norm);
}

SmoothOracle counted_oracle(const SmoothOracle& g, EvalCounters& counters) {
  SmoothOracle out;
  auto value = g.value;
  auto gradient = g.gradient;
  EvalCounters* c = &counters;
  out.value = [value, c](const Vec& x) {
    ++c->n_obj;
    return value(x);
  };
  out.gradient = [gradient, c](const Vec& x) {
    ++c->n_grad;
    return gradient(x);
  };
  if (g.value_and_gradient) {
    auto fused = g.value_and_gradient;
    out.value_and_gradient = [fused, c](const Vec& x, Vec& grad) {
      ++c->n_obj;
      ++c->n_grad;
      return fused(x, grad);
    };
  }
  out.lipschitz_hint = g.lipschitz_hint;
  return out;
}

}  // namespace hiapem
