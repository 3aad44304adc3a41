#include "srlab/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace srlab {

std::vector<int64_t> sample_renewal_path(const RenewalLaw& law, int64_t start,
                                         int64_t horizon, RngStream& rng) {
  if (start > horizon)
    throw std::invalid_argument("renewal path start beyond horizon");
  std::vector<int64_t> points;
  int64_t t = start;
  while (t <= horizon) {
    points.push_back(t);
    t += sample_interarrival(law, rng);
  }
  return points;
}

WindowSet sample_window_set(const RenewalLaw& law, const RenewalTables& tables,
                            int64_t n, int64_t horizon, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("window length must be >= 1");
  if (horizon < n) throw std::invalid_argument("horizon must be >= n");
  if (n + 1 >= tables.w.size())
    throw std::invalid_argument("window length exceeds table horizon");

  const double wn = tables.w[n];
  const double Fn = law.cdf(n);
  const double target = rng.next_u01() * wn;

  int64_t first;
  if (target < Fn) {
    // Delayed at 0: first window point is an inter-arrival given T <= n.
    const double v = law.tail(n) + rng.next_u01() * Fn;
    first = law.quantile_from_tail(std::min(v, 1.0 - 1e-17));
    if (first > n) first = n;  // guard against boundary rounding
  } else {
    // Delay mass F̄(d) for d = 1..n: cumulative sums are w[d+1] - 1.
    const double excess = target - Fn + 1.0;
    const double* lo = tables.w.data() + 2;       // w[2] = 1 + F̄(1)
    const double* hi = tables.w.data() + n + 2;   // one past w[n+1]
    first = (std::upper_bound(lo, hi, excess) - lo) + 1;
    if (first > n) first = n;
  }

  WindowSet set;
  set.n = n;
  set.horizon = horizon;
  int64_t t = first;
  while (t <= horizon) {
    set.points.push_back(t);
    t += sample_interarrival(law, rng);
  }
  return set;
}

std::vector<int64_t> intersect_sorted(const std::vector<int64_t>& a,
                                      const std::vector<int64_t>& b) {
  std::vector<int64_t> out;
  intersect_sorted_into(a, b, out);
  return out;
}

void intersect_sorted_into(const std::vector<int64_t>& a,
                           const std::vector<int64_t>& b,
                           std::vector<int64_t>& out) {
  out.clear();
  if (a.empty() || b.empty()) return;
  if (a.back() < b.front() || b.back() < a.front()) return;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (b[j] < a[i])
      ++j;
    else {
      out.push_back(a[i]);
      ++i;
      ++j;
    }
  }
}

TailProcessSample sample_tail_process(const RenewalLaw& law, int64_t L,
                                      RngStream& rng) {
  if (L < 1) throw std::invalid_argument("tail-process horizon must be >= 1");
  const auto path1 = sample_renewal_path(law, 0, L, rng);
  const auto path2 = sample_renewal_path(law, 0, L, rng);
  TailProcessSample s;
  s.L = L;
  s.common = intersect_sorted(path1, path2);
  return s;
}

TailProcessSample sample_two_sided_tail(const RenewalLaw& law, int64_t L,
                                        RngStream& rng) {
  TailProcessSample s = sample_tail_process(law, L, rng);
  TailProcessSample neg = sample_tail_process(law, L, rng);
  s.negative = std::move(neg.common);
  return s;
}

LimitProcessSample sample_limit_point_process(double theta, double alpha,
                                              double qf2, int64_t M,
                                              RngStream& rng) {
  if (M < 1) throw std::invalid_argument("limit process needs M >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  LimitProcessSample s;
  s.heights.reserve(M);
  s.marks.reserve(M);
  s.locations.reserve(M);
  double gamma = 0.0;
  const double scale = std::pow(theta, 1.0 / alpha);
  for (int64_t l = 0; l < M; ++l) {
    gamma += rng.next_exponential();
    s.heights.push_back(scale * std::pow(gamma, -1.0 / alpha));
    s.marks.push_back(rng.next_geometric(qf2));
    s.locations.push_back(rng.next_u01());
  }
  return s;
}

}  // namespace srlab
