#pragma once

// Simulator for the truncated series representation of the model path:
// m stationary window sets, Poisson arrival weights, and the accumulated
// pairwise-intersection series
//   x[k] = w_n^{2/alpha} * sum_{i1<i2} (Gamma_{i1} Gamma_{i2})^{-1/alpha}
//          * 1{k in R_{i1} ∩ R_{i2}}.

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "srlab/renewal.hpp"
#include "srlab/rng.hpp"
#include "srlab/sampling.hpp"

namespace srlab {

enum class TruncationMode { kMacroscopic, kMesoscopic };

// Number of Poisson arrivals retained by the truncated series. Macroscopic
// runs take the geometric mean of the window w_n^2/(n log^{1/(1-alpha)} n)
// .. w_n^2 log n / n; mesoscopic runs at block exponent rho take the
// geometric mean of w_n/(d^beta log n) .. (w_n/d^beta) log n, which
// collapses to w_n / d^beta. Clamped to >= 8.
int64_t default_truncation(const RenewalLaw& law, int64_t n, double alpha,
                           TruncationMode mode, double rho = 0.0);

struct SeriesConfig {
  int64_t n = 0;
  double alpha = 0.0;
  RenewalLaw law{0.3};
  std::shared_ptr<const RenewalTables> tables;
  int64_t m = 0;  // truncation level (Poisson arrivals retained)
  uint64_t seed = 0;
  TruncationMode mode = TruncationMode::kMacroscopic;
  double rho = 0.0;          // block exponent, mesoscopic mode only
  bool record_pairs = false;  // keep contributing pair diagnostics

  void validate() const;
};

struct ContributingPair {
  int32_t i1 = 0;
  int32_t i2 = 0;
  std::vector<int64_t> points;  // common points within {1..n}
};

struct PathSample {
  Eigen::VectorXd x;      // x[k-1] = value at time k, k = 1..n
  Eigen::VectorXd gamma;  // first m Poisson arrival times
  std::vector<ContributingPair> pairs;  // filled when record_pairs is set
};

// Deterministic given the stream: arrivals first, then window sets, in index
// order. Pair weights are assembled in log space and exponentiated once.
PathSample simulate_path(const SeriesConfig& config, RngStream& rng);

// Convenience: the replication stream for (config.seed, rep).
PathSample simulate_path(const SeriesConfig& config, uint64_t replication);

// S = sum_k x[k] / b_n.
double partial_sum(const PathSample& path, double alpha, int64_t n);

// Path dump (columns k, x_k) and a replication manifest line
// {"seed":..,"rep":..,"digest":".."} for reproducibility audits.
void write_path_csv(const PathSample& path, std::ostream& os);
void write_path_binary(const PathSample& path, std::ostream& os);
uint64_t path_digest(const PathSample& path);
void write_manifest_line(uint64_t seed, uint64_t rep, const PathSample& path,
                         std::ostream& os);

}  // namespace srlab
