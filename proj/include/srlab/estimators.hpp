#pragma once

// Statistical reductions over replications: block-maxima exceedance rates,
// running-maximum law, cluster extraction, tail-process functionals, and the
// exact window hit-probability oracles.

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "srlab/process.hpp"
#include "srlab/renewal.hpp"
#include "srlab/sampling.hpp"
#include "srlab/stats.hpp"

namespace srlab {

struct BlockScheme {
  int64_t n = 0;
  double rho = 0.0;
  int64_t d = 0;  // block length floor(n^rho)
  int64_t k = 0;  // block count floor(n/d)
};

BlockScheme make_block_scheme(int64_t n, double rho);

// Block scheme for macroscopic counts: d = floor(n / log n).
BlockScheme make_log_block_scheme(int64_t n);

struct EstimateRecord {
  std::string name;
  double rho = std::numeric_limits<double>::quiet_NaN();
  double y = std::numeric_limits<double>::quiet_NaN();
  double estimate = 0.0;
  double se = std::numeric_limits<double>::quiet_NaN();
  double clustered_se = std::numeric_limits<double>::quiet_NaN();
  double target = std::numeric_limits<double>::quiet_NaN();
  std::string target_provenance;
  double z = std::numeric_limits<double>::quiet_NaN();
  int64_t count = 0;
};

// --- per-path reductions ---------------------------------------------------

Eigen::VectorXd block_maxima(const Eigen::VectorXd& x,
                             const BlockScheme& scheme);
int64_t count_exceeding_blocks(const Eigen::VectorXd& x,
                               const BlockScheme& scheme, double threshold);

struct AcCounts {
  int64_t events = 0;  // positions with x[k] > b*y and a full window ahead
  int64_t hits = 0;    // among them, max over [k+m_lag, k+d] exceeds b*x
};
AcCounts ac_window_counts(const Eigen::VectorXd& x, int64_t d, int64_t m_lag,
                          double threshold_x, double threshold_y);

// --- estimate assembly from reduced data ------------------------------------

// k_n * P(block max > b*y) from per-path exceeding-block counts; target
// theta_rho(beta, rho, qf2) * y^(-alpha). Reports the per-block binomial SE
// and a per-path clustered SE.
EstimateRecord block_rate_record(const std::vector<int64_t>& counts_per_path,
                                 const BlockScheme& scheme, double y,
                                 double alpha, double beta, double qf2);

std::vector<EstimateRecord> running_max_cdf_records(
    std::span<const double> path_maxima, double alpha, double theta,
    std::span<const double> x_grid, double b);

EstimateRecord ac_profile_record(const std::vector<AcCounts>& per_path,
                                 int64_t m_lag, double x, double y);

// Conditional exceedance profile from whole paths (batch form).
EstimateRecord anticlustering_profile(std::span<const PathSample> paths,
                                      int64_t m_lag, const BlockScheme& scheme,
                                      double b, double x, double y);

// --- batch forms over simulated paths ---------------------------------------

EstimateRecord block_exceedance_rate(std::span<const PathSample> paths,
                                     const BlockScheme& scheme, double b,
                                     double y, double alpha, double beta,
                                     double qf2);

std::vector<EstimateRecord> running_max_cdf(std::span<const PathSample> paths,
                                            double alpha, double theta,
                                            std::span<const double> x_grid,
                                            double b);

// --- clusters ---------------------------------------------------------------

struct ClusterRecord {
  int64_t block = 0;
  std::vector<int64_t> offsets;  // exceedance times, first at 0
  std::vector<double> values;
  double block_max = 0.0;
  double flatness = 0.0;  // min exceedance / max exceedance
};

std::vector<ClusterRecord> extract_clusters(const Eigen::VectorXd& x,
                                            const BlockScheme& scheme,
                                            double threshold);

// --- tail-process functionals ------------------------------------------------

// P(no common renewal in {1..L}): equals the candidate clustering constant
// for a 0/1 tail process with value 1 at the origin. Bias bound from the
// tables' residual sum is recorded in the provenance.
EstimateRecord candidate_index_estimate(std::span<const TailProcessSample>,
                                        const RenewalTables& tables);
EstimateRecord candidate_index_record(int64_t isolated, int64_t total,
                                      int64_t L, const RenewalTables& tables);

// Chi-square of two-sided cluster counts against m (1-q)^{m-1} q^2.
EstimateRecord two_sided_count_identity(
    const std::map<int64_t, int64_t>& histogram, const RenewalTables& tables);

// Chi-square of a sample of one-sided cluster sizes against geometric(qF2).
EstimateRecord geometric_gof_record(const std::map<int64_t, int64_t>& histogram,
                                    double qf2, const std::string& name);

// --- exact oracles -----------------------------------------------------------

// sum_{j=0}^{d-1} F̄*(j): the finite-block scaling constant; value/d
// approaches qF2 from above as d grows.
double finite_block_constant(const RenewalTables& tables, int64_t d);

// Exact window hit probabilities: P(R_n hits {1..d}) = w_d / w_n and
// P(R_{n,1} ∩ R_{n,2} hits {1..d}) = (1/w_n^2) sum_{k<d} F̄*(k), compared
// against Monte Carlo and against their large-d power-law forms.
std::vector<EstimateRecord> hit_probability_check(const RenewalLaw& law,
                                                  const RenewalTables& tables,
                                                  int64_t n, int64_t d,
                                                  int64_t reps, uint64_t seed,
                                                  uint64_t rep_base = 0);

// --- marginal uniformity of the window set ----------------------------------

// Quadratic-form test of per-position hit counts against the flat marginal
// 1/w_n. Counts at different positions within one draw are correlated
// through the renewal structure, so the statistic sum (O_k - Np)^2/(Np(1-p))
// is referred to its exact null: a weighted chi-square whose weights are the
// eigenvalues of the Toeplitz correlation built from the u table.
Chi2Result window_marginal_chi2(const std::vector<int64_t>& position_counts,
                                int64_t draws, const RenewalTables& tables,
                                int64_t n);

}  // namespace srlab
