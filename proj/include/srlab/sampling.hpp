#pragma once

// Elementary samplers: inter-renewal draws by exact inversion, renewal
// paths, stationary window sets conditioned to hit {1..n}, the tail process
// of common renewals of two independent paths, and the limiting marked
// point process.

#include <cstdint>
#include <optional>
#include <vector>

#include "srlab/renewal.hpp"
#include "srlab/rng.hpp"

namespace srlab {

// One inter-renewal time with P(T > k) = F̄(k) exactly.
inline int64_t sample_interarrival(const RenewalLaw& law, RngStream& rng) {
  return law.quantile_from_tail(rng.next_u01());
}

// Renewal path {start, start+T1, start+T1+T2, ...} truncated at horizon.
std::vector<int64_t> sample_renewal_path(const RenewalLaw& law, int64_t start,
                                         int64_t horizon, RngStream& rng);

// A stationary-delay renewal set conditioned to intersect {1..n}: the first
// point lands in {1..n} with P(first point = d) = F̄(d)/w_n for d = 1..n and
// with probability F(n)/w_n at an inter-arrival conditioned to be <= n; the
// set then extends by i.i.d. inter-arrivals up to the horizon. Marginally
// P(k in set) = 1/w_n for every k in {1..n}.
struct WindowSet {
  int64_t n = 0;
  int64_t horizon = 0;
  std::vector<int64_t> points;
};

WindowSet sample_window_set(const RenewalLaw& law, const RenewalTables& tables,
                            int64_t n, int64_t horizon, RngStream& rng);

// Sorted intersection of two strictly increasing integer arrays.
std::vector<int64_t> intersect_sorted(const std::vector<int64_t>& a,
                                      const std::vector<int64_t>& b);
void intersect_sorted_into(const std::vector<int64_t>& a,
                           const std::vector<int64_t>& b,
                           std::vector<int64_t>& out);

// Common renewal times of two independent renewal paths started at 0,
// restricted to {0..L}. Always contains 0. For the two-sided variant a
// second independent pair supplies the negative lags (stored as positive
// distances, sharing the origin).
struct TailProcessSample {
  int64_t L = 0;
  std::vector<int64_t> common;
  std::optional<std::vector<int64_t>> negative;

  // Number of common renewal times, counting the origin once.
  int64_t total_count() const {
    const int64_t neg =
        negative ? static_cast<int64_t>(negative->size()) - 1 : 0;
    return static_cast<int64_t>(common.size()) + neg;
  }
};

TailProcessSample sample_tail_process(const RenewalLaw& law, int64_t L,
                                      RngStream& rng);
TailProcessSample sample_two_sided_tail(const RenewalLaw& law, int64_t L,
                                        RngStream& rng);

// Limiting marked point process: heights theta^{1/alpha} Gamma_l^{-1/alpha}
// (strictly decreasing), geometric(qF2) marks, uniform locations.
struct LimitProcessSample {
  std::vector<double> heights;
  std::vector<int64_t> marks;
  std::vector<double> locations;
};

LimitProcessSample sample_limit_point_process(double theta, double alpha,
                                              double qf2, int64_t M,
                                              RngStream& rng);

}  // namespace srlab
