#pragma once

// Config-driven experiment front end: table caching, parallel replication
// over counter-based streams, estimator reductions, and CSV / JSON-lines
// result output.

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "srlab/estimators.hpp"
#include "srlab/process.hpp"
#include "srlab/renewal.hpp"

namespace srlab {

struct ExperimentConfig {
  std::string command;
  double alpha = 0.7;
  double beta = 0.3;
  int64_t n = 100000;
  std::vector<double> rho;
  std::vector<double> y;
  int64_t reps = 1000;
  int64_t m_override = -1;  // truncation level; <= 0 means default policy
  int64_t table_horizon = 1000000;
  uint64_t seed = 1;
  int parallelism = 0;  // 0: hardware concurrency
  std::string out;
  std::string format = "csv";
  std::string cache_dir = ".srlab-cache";
  std::string dump_tables;  // constants: export tables to this path

  // Stable digest of the reproducibility-relevant fields.
  std::string digest() const;
  std::string echo() const;
};

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct CommandResult {
  std::vector<EstimateRecord> rows;
  std::vector<PlotPoint> plot;
};

// Replications 0..reps-1 distributed over a worker pool; results land in a
// vector indexed by replication, so the merge order never depends on the
// worker count.
template <typename T, typename Fn>
std::vector<T> run_replications(int64_t reps, int parallelism, Fn&& fn) {
  const int workers = parallelism > 0
                          ? parallelism
                          : std::max(1u, std::thread::hardware_concurrency());
  std::vector<T> results(static_cast<size_t>(reps));
  if (workers == 1 || reps < 2) {
    for (int64_t r = 0; r < reps; ++r) results[r] = fn(r);
    return results;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int wkr = 0; wkr < workers; ++wkr) {
    pool.emplace_back([&] {
      try {
        while (true) {
          const int64_t r = next.fetch_add(1);
          if (r >= reps) break;
          results[r] = fn(r);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(reps);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

// Disk-cached tables keyed by (beta, N); builds on miss and writes through a
// temp-file rename so concurrent processes cannot observe partial files.
std::shared_ptr<const RenewalTables> cached_tables(double beta, int64_t N,
                                                   const std::string& cache_dir);

CommandResult cmd_constants(const ExperimentConfig& config);
CommandResult cmd_phase_sweep(const ExperimentConfig& config);
CommandResult cmd_macro(const ExperimentConfig& config);
CommandResult cmd_tailproc(const ExperimentConfig& config);
CommandResult cmd_hitprob(const ExperimentConfig& config);
CommandResult cmd_ac(const ExperimentConfig& config);
CommandResult cmd_sums(const ExperimentConfig& config);

CommandResult run_command(const ExperimentConfig& config);

void write_records(std::ostream& os, const ExperimentConfig& config,
                   const std::vector<EstimateRecord>& rows,
                   double duration_ms);
void write_plot(std::ostream& os, const std::vector<PlotPoint>& points);

// Full CLI entry point (argument parsing, dispatch, output files).
// Returns 0 on success, 2 on parameter errors, 3 on numerical errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace srlab
