// Benchmark harness: runs the three solver modes over seeded random
// instances and serializes one result row per (trial, method) plus one
// mean row per method.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hiapem/generators.hpp"
#include "hiapem/hiapem.hpp"

namespace hiapem {

enum class ProblemFamily { lcqp, qcqp };

/// One benchmark suite: `trials` instances of one family, each solved by
/// every listed mode. Instance t uses seed `seed + t`; solver randomness
/// does not exist, so the pair (config, seed) fixes every non-time column.
struct SuiteConfig {
  ProblemFamily family = ProblemFamily::lcqp;
  Index n = 10;
  Index m = 5;
  double rho = 1.0;
  double eps = 1e-3;
  int trials = 5;
  std::uint64_t seed = 1;
  std::vector<SolveMode> methods = {SolveMode::hybrid};
  /// Template for every solve; eps, rho and mode are overwritten per run.
  HiapemConfig solver;
};

/// One completed (or failed) solve. `comp` is serialized under the CSV
/// column name "compl", which is not usable as a field name.
struct BenchRow {
  int trial = 0;
  std::string method;
  std::uint64_t seed = 0;
  double pres = 0.0;
  double dres = 0.0;
  double comp = 0.0;
  double time_s = 0.0;
  std::int64_t n_obj = 0;
  std::int64_t n_grad = 0;
  int stages = 0;
  int outer_iters = 0;
  /// "ok", "kkt_fail" (finished but over tolerance), or "error:<kind>".
  std::string status;
};

/// Mean over the data rows of one method. Count columns turn fractional
/// here; the trial column is serialized as "avg".
struct BenchAverage {
  std::string method;
  std::uint64_t seed = 0;
  double pres = 0.0;
  double dres = 0.0;
  double comp = 0.0;
  double time_s = 0.0;
  double n_obj = 0.0;
  double n_grad = 0.0;
  double stages = 0.0;
  double outer_iters = 0.0;
  /// "ok" when every averaged row is ok, else "mixed".
  std::string status;
};

struct BenchResult {
  std::vector<BenchRow> rows;  // trial-major, methods in config order
  std::vector<BenchAverage> averages;  // one per method
  bool all_ok = false;                 // every data row has status "ok"
};

/// CLI name of a mode: hybrid -> "hiapem", pure_ialm -> "ialm",
/// pure_penalty -> "penalty".
std::string method_name(SolveMode mode);

/// Number of worker threads for `task_count` independent tasks: the
/// SOLVER_THREADS environment variable when set (floored at 1), else the
/// hardware concurrency, both capped at task_count.
int resolve_thread_cap(int task_count);

/// Runs the suite. Trials execute in parallel up to resolve_thread_cap;
/// every row's residual triple is recomputed by check_eps_kkt on the
/// returned point, not copied from the solver. A solver exception turns
/// into a status "error:<kind>" row and the suite keeps going.
BenchResult run_benchmark(const SuiteConfig& cfg);

/// Writes header, data rows and average rows. Header:
///   trial,method,seed,pres,dres,compl,time_s,n_obj,n_grad,stages,outer_iters,status
void write_csv(std::ostream& out, const BenchResult& result);

/// write_csv into a file, replacing any previous content.
void write_csv_file(const std::string& path, const BenchResult& result);

}  // namespace hiapem
