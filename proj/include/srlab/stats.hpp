#pragma once

// Test statistics used by the estimator layer: chi-square goodness of fit
// with tail pooling, dispersion against a fixed Poisson mean, two-sample
// Kolmogorov-Smirnov distance, and the tail of a positively weighted sum of
// chi-square(1) variables (for quadratic forms of correlated counts).

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

namespace srlab {

// Regularized upper incomplete gamma Q(a, x) = Γ(a,x)/Γ(a); series expansion
// below the diagonal, Lentz continued fraction above.
double gamma_q(double a, double x);

// Survival function of chi-square with df degrees of freedom.
double chi2_sf(double stat, double df);

// Standard normal survival function.
double normal_sf(double z);

struct Chi2Result {
  double stat = 0.0;
  double df = 0.0;
  double pvalue = 1.0;
  int bins = 0;
};

// Pearson chi-square of observed counts against cell probabilities. Tail
// cells are pooled (right to left) until every pooled cell has expected
// count >= min_expected. probs need not sum to 1; the leftover mass belongs
// to an implicit final cell with observed count total - sum(observed).
Chi2Result chi2_gof(const std::vector<int64_t>& observed,
                    const std::vector<double>& probs, int64_t total,
                    double min_expected = 5.0);

// Chi-square GOF for a distribution on {1,2,...} given by pmf(m), with the
// histogram of observed values and the open tail folded into the last cell.
Chi2Result chi2_gof_discrete(const std::map<int64_t, int64_t>& histogram,
                             const std::vector<double>& pmf_by_value,
                             double tail_mass, int64_t total,
                             double min_expected = 5.0);

// Dispersion test of counts against Poisson with known mean: sum (c-mean)^2 /
// mean is chi-square with #counts degrees of freedom; two-sided p-value.
Chi2Result dispersion_known_mean(const std::vector<int64_t>& counts,
                                 double mean);

// Two-sample Kolmogorov-Smirnov distance (sup norm of empirical CDF gap).
double ks_distance(std::vector<double> a, std::vector<double> b);

// P(sum_i lambda_i Z_i^2 > t) for Z_i iid standard normal, via the
// Hall-Buckley-Eagleson three-moment chi-square match.
double weighted_chi2_sf(const Eigen::VectorXd& lambdas, double t);

inline double sample_mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

inline double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace srlab
