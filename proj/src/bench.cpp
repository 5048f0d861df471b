#include "hiapem/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hiapem/errors.hpp"

namespace hiapem {

namespace {

std::string classify(const std::exception& e) {
  if (dynamic_cast<const LineSearchError*>(&e)) return "error:line_search";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "error:convergence";
  if (dynamic_cast<const DualFeasibilityError*>(&e))
    return "error:dual_feasibility";
  if (dynamic_cast<const DimensionError*>(&e)) return "error:dimension";
  if (dynamic_cast<const MetadataError*>(&e)) return "error:metadata";
  if (dynamic_cast<const ConfigError*>(&e)) return "error:config";
  if (dynamic_cast<const GridError*>(&e)) return "error:grid";
  return "error:unknown";
}

ProblemSpec make_instance(const SuiteConfig& cfg, std::uint64_t seed) {
  if (cfg.family == ProblemFamily::lcqp)
    return gen_lcqp(cfg.n, cfg.m, cfg.rho, seed).problem;
  return gen_qcqp(cfg.n, cfg.m, cfg.rho, seed).problem;
}

BenchRow solve_one(const SuiteConfig& cfg, const ProblemSpec& problem,
                   int trial, std::uint64_t seed, SolveMode mode) {
  BenchRow row;
  row.trial = trial;
  row.method = method_name(mode);
  row.seed = seed;

  HiapemConfig solver = cfg.solver;
  solver.eps = cfg.eps;
  solver.rho = cfg.rho;
  solver.mode = mode;
  Vec x0 = Vec::Zero(problem.n);

  try {
    auto t0 = std::chrono::steady_clock::now();
    SolveSummary summary =
        mode == SolveMode::hybrid ? hiapem_solve(problem, x0, solver)
        : mode == SolveMode::pure_ialm
            ? pure_ialm_solve(problem, x0, solver)
            : pure_penalty_solve(problem, x0, solver);
    auto t1 = std::chrono::steady_clock::now();
    row.time_s = std::chrono::duration<double>(t1 - t0).count();
    row.n_obj = summary.counters.n_obj;
    row.n_grad = summary.counters.n_grad;
    row.stages = summary.stages;
    row.outer_iters = summary.outer_iters;
    KktCheck check = check_eps_kkt(problem, summary.x, summary.p,
                                   summary.report.certificate, cfg.eps);
    row.pres = check.report.pres;
    row.dres = check.report.dres;
    row.comp = check.report.comp;
    row.status = check.ok ? "ok" : "kkt_fail";
  } catch (const std::exception& e) {
    double nan = std::nan("");
    row.pres = row.dres = row.comp = nan;
    row.status = classify(e);
  }
  return row;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_row(std::ostream& out, const BenchRow& row) {
  char time_buf[64];
  std::snprintf(time_buf, sizeof(time_buf), "%.6f", row.time_s);
  out << row.trial << ',' << row.method << ',' << row.seed << ','
      << fmt(row.pres) << ',' << fmt(row.dres) << ',' << fmt(row.comp) << ','
      << time_buf << ',' << row.n_obj << ',' << row.n_grad << ','
      << row.stages << ',' << row.outer_iters << ',' << row.status << '\n';
}

// Average rows carry fractional counts; they are serialized with one
// decimal instead of the integer fields of data rows.
void write_avg_row(std::ostream& out, const BenchAverage& avg) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.6f,%.1f,%.1f,%.1f,%.1f", avg.time_s,
                avg.n_obj, avg.n_grad, avg.stages, avg.outer_iters);
  out << "avg," << avg.method << ',' << avg.seed << ',' << fmt(avg.pres)
      << ',' << fmt(avg.dres) << ',' << fmt(avg.comp) << ',' << buf << ','
      << avg.status << '\n';
}

}  // namespace

std::string method_name(SolveMode mode) {
  switch (mode) {
    case SolveMode::hybrid:
      return "hiapem";
    case SolveMode::pure_ialm:
      return "ialm";
    case SolveMode::pure_penalty:
      return "penalty";
  }
  throw ConfigError("unknown solve mode");
}

int resolve_thread_cap(int task_count) {
  if (task_count < 1) return 1;
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("SOLVER_THREADS")) {
    char* end = nullptr;
    long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed >= 1) cap = static_cast<int>(parsed);
  }
  return std::min(cap, task_count);
}

BenchResult run_benchmark(const SuiteConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (cfg.methods.empty()) throw ConfigError("no methods selected");

  // One slot per trial; workers own disjoint slots, so the only shared
  // state is the claim counter.
  std::vector<std::vector<BenchRow>> per_trial(
      static_cast<std::size_t>(cfg.trials));
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (;;) {
      int t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(t);
      ProblemSpec problem = make_instance(cfg, seed);
      auto& rows = per_trial[static_cast<std::size_t>(t)];
      for (SolveMode mode : cfg.methods)
        rows.push_back(solve_one(cfg, problem, t, seed, mode));
    }
  };

  int threads = resolve_thread_cap(cfg.trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BenchResult result;
  result.all_ok = true;
  for (auto& rows : per_trial)
    for (auto& row : rows) {
      if (row.status != "ok") result.all_ok = false;
      result.rows.push_back(std::move(row));
    }

  for (SolveMode mode : cfg.methods) {
    BenchAverage avg;
    avg.method = method_name(mode);
    avg.seed = cfg.seed;
    avg.status = "ok";
    int count = 0;
    for (const BenchRow& row : result.rows) {
      if (row.method != avg.method) continue;
      ++count;
      avg.pres += row.pres;
      avg.dres += row.dres;
      avg.comp += row.comp;
      avg.time_s += row.time_s;
      avg.n_obj += static_cast<double>(row.n_obj);
      avg.n_grad += static_cast<double>(row.n_grad);
      avg.stages += row.stages;
      avg.outer_iters += row.outer_iters;
      if (row.status != "ok") avg.status = "mixed";
    }
    double inv = 1.0 / count;
    avg.pres *= inv;
    avg.dres *= inv;
    avg.comp *= inv;
    avg.time_s *= inv;
    avg.n_obj *= inv;
    avg.n_grad *= inv;
    avg.stages *= inv;
    avg.outer_iters *= inv;
    result.averages.push_back(avg);
  }
  return result;
}

void write_csv(std::ostream& out, const BenchResult& result) {
  out << "trial,method,seed,pres,dres,compl,time_s,n_obj,n_grad,stages,"
         "outer_iters,status\n";
  for (const BenchRow& row : result.rows) write_row(out, row);
  for (const BenchAverage& avg : result.averages) write_avg_row(out, avg);
}

void write_csv_file(const std::string& path, const BenchResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file: " + path);
  write_csv(out, result);
}

}  // namespace hiapem
