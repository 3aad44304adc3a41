#include "srlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace srlab {

namespace {

// Series representation of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a,x), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::invalid_argument("gamma_q requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double stat, double df) {
  if (stat <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * stat);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

Chi2Result chi2_gof(const std::vector<int64_t>& observed,
                    const std::vector<double>& probs, int64_t total,
                    double min_expected) {
  if (observed.size() != probs.size())
    throw std::invalid_argument("chi2_gof: size mismatch");
  const double n = static_cast<double>(total);

  // Pool from the right until the pooled tail reaches the expected minimum.
  std::vector<double> exp_cells;
  std::vector<double> obs_cells;
  double tail_exp = 0.0, tail_obs = 0.0;
  size_t cut = observed.size();
  if (n * probs[cut - 1] < min_expected) {
    while (cut > 1 && tail_exp < min_expected) {
      --cut;
      tail_exp += n * probs[cut];
      tail_obs += static_cast<double>(observed[cut]);
    }
  }
  for (size_t i = 0; i < cut; ++i) {
    exp_cells.push_back(n * probs[i]);
    obs_cells.push_back(static_cast<double>(observed[i]));
  }
  if (tail_exp > 0.0) {
    exp_cells.push_back(tail_exp);
    obs_cells.push_back(tail_obs);
  }

  Chi2Result r;
  r.bins = static_cast<int>(exp_cells.size());
  for (size_t i = 0; i < exp_cells.size(); ++i) {
    if (exp_cells[i] <= 0.0) continue;
    const double d = obs_cells[i] - exp_cells[i];
    r.stat += d * d / exp_cells[i];
  }
  r.df = static_cast<double>(r.bins - 1);
  r.pvalue = r.df > 0 ? chi2_sf(r.stat, r.df) : 1.0;
  return r;
}

Chi2Result chi2_gof_discrete(const std::map<int64_t, int64_t>& histogram,
                             const std::vector<double>& pmf_by_value,
                             double tail_mass, int64_t total,
                             double min_expected) {
  // Cells are values 1..M followed by one open cell carrying tail_mass.
  const size_t m = pmf_by_value.size();
  std::vector<int64_t> obs(m + 1, 0);
  for (const auto& [value, count] : histogram) {
    if (value < 1) throw std::invalid_argument("histogram value < 1");
    if (static_cast<size_t>(value) <= m)
      obs[value - 1] += count;
    else
      obs[m] += count;
  }
  std::vector<double> probs = pmf_by_value;
  probs.push_back(tail_mass);
  return chi2_gof(obs, probs, total, min_expected);
}

Chi2Result dispersion_known_mean(const std::vector<int64_t>& counts,
                                 double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("mean must be positive");
  Chi2Result r;
  for (int64_t c : counts) {
    const double d = static_cast<double>(c) - mean;
    r.stat += d * d / mean;
  }
  r.df = static_cast<double>(counts.size());
  r.bins = static_cast<int>(counts.size());
  const double upper = chi2_sf(r.stat, r.df);
  r.pvalue = 2.0 * std::min(upper, 1.0 - upper);
  return r;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double weighted_chi2_sf(const Eigen::VectorXd& lambdas, double t) {
  const double k1 = lambdas.sum();
  const double k2 = 2.0 * lambdas.array().square().sum();
  const double k3 = 8.0 * lambdas.array().cube().sum();
  if (k2 <= 0.0 || k3 <= 0.0)
    throw std::invalid_argument("weighted_chi2_sf needs positive weights");
  const double c = k3 / (4.0 * k2);
  const double nu = 8.0 * k2 * k2 * k2 / (k3 * k3);
  const double shifted = nu + (t - k1) / c;
  if (shifted <= 0.0) return 1.0;
  return chi2_sf(shifted, nu);
}

}  // namespace srlab
