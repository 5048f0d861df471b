#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>

namespace hiapem {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Multiplier pair (y, z): y for affine rows, z for functional constraints.
/// Invariant: z >= 0 componentwise. Either block may be empty.
struct DualPair {
  Vec y;
  Vec z;

  static DualPair zeros(Index affine_rows, Index constraint_count) {
    return DualPair{Vec::Zero(affine_rows), Vec::Zero(constraint_count)};
  }

  /// Euclidean norm of the stacked vector (y, z).
  double norm() const { return std::sqrt(y.squaredNorm() + z.squaredNorm()); }
};

/// Residual triple of an approximate KKT point, together with the
/// subgradient certificate whose norm is the dual residual.
struct KktReport {
  double pres = 0.0;  ///< sqrt(||Ax-b||^2 + ||[f(x)]_+||^2)
  double dres = 0.0;  ///< norm of `certificate`
  double comp = 0.0;  ///< sum_i |z_i f_i(x)|
  Vec certificate;    ///< element of the relevant subdifferential at x
};

/// Oracle call counters. n_obj and n_grad count evaluations of the smooth
/// part handed to the inner solver; n_prox counts proximal steps.
struct EvalCounters {
  std::int64_t n_obj = 0;
  std::int64_t n_grad = 0;
  std::int64_t n_prox = 0;

  std::int64_t total_fg() const { return n_obj + n_grad; }

  EvalCounters& operator+=(const EvalCounters& o) {
    n_obj += o.n_obj;
    n_grad += o.n_grad;
    n_prox += o.n_prox;
    return *this;
  }

  friend EvalCounters operator-(EvalCounters a, const EvalCounters& b) {
    a.n_obj -= b.n_obj;
    a.n_grad -= b.n_grad;
    a.n_prox -= b.n_prox;
    return a;
  }

  friend bool operator==(const EvalCounters& a, const EvalCounters& b) {
    return a.n_obj == b.n_obj && a.n_grad == b.n_grad && a.n_prox == b.n_prox;
  }
};

}  // namespace hiapem
