#include "srlab/process.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace srlab {

namespace {

double window_mass(const RenewalLaw& law, int64_t n) {
  long double s = 0.0L;
  for (int64_t k = 0; k < n; ++k) s += law.tail(k);
  return static_cast<double>(s);
}

}  // namespace

int64_t default_truncation(const RenewalLaw& law, int64_t n, double alpha,
                           TruncationMode mode, double rho) {
  if (n < 2) throw std::invalid_argument("path length must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  const double wn = window_mass(law, n);
  const double logn = std::log(static_cast<double>(n));
  double m;
  if (mode == TruncationMode::kMacroscopic) {
    const double lo = wn * wn / (static_cast<double>(n) *
                                 std::pow(logn, 1.0 / (1.0 - alpha)));
    const double hi = wn * wn * logn / static_cast<double>(n);
    m = std::sqrt(lo * hi);
  } else {
    if (!(rho > 0.0 && rho <= 1.0))
      throw std::invalid_argument("mesoscopic truncation needs rho in (0,1]");
    const double d = std::floor(std::pow(static_cast<double>(n), rho));
    m = wn / std::pow(d, law.beta());  // log factors cancel in the mean
  }
  return std::max<int64_t>(8, std::llround(m));
}

void SeriesConfig::validate() const {
  if (n < 2) throw std::invalid_argument("path length must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  if (m < 2) throw std::invalid_argument("truncation level must be >= 2");
  if (!tables) throw std::invalid_argument("config carries no tables");
  if (mode == TruncationMode::kMesoscopic && !(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("mesoscopic mode needs rho in (0,1]");
  if (n + 1 >= tables->w.size())
    throw std::invalid_argument("path length exceeds table horizon");
}

PathSample simulate_path(const SeriesConfig& config, RngStream& rng) {
  config.validate();
  const int64_t n = config.n;
  const int64_t m = config.m;

  PathSample out;
  out.x = Eigen::VectorXd::Zero(n);

  // Arrival times Gamma_1 < ... < Gamma_{m+1}; the path uses the first m.
  std::vector<double> log_gamma(m);
  out.gamma.resize(m);
  {
    double g = 0.0;
    for (int64_t i = 0; i < m + 1; ++i) {
      g += rng.next_exponential();
      if (i < m) {
        out.gamma[i] = g;
        log_gamma[i] = std::log(g);
      }
    }
  }

  std::vector<std::vector<int64_t>> sets(m);
  for (int64_t i = 0; i < m; ++i)
    sets[i] = sample_window_set(config.law, *config.tables, n, n, rng).points;

  const double log_w = std::log(config.tables->w[n]);
  const double inv_alpha = 1.0 / config.alpha;
  const double c = 2.0 * inv_alpha * log_w;

  // Inverted index over time: only about m/w_n sets cover any given k, so
  // walking per-time posting lists touches each co-covered time directly
  // instead of merging all m(m-1)/2 pairs of sorted sets.
  std::vector<int32_t> cover_count(n + 1, 0);
  int64_t total_points = 0;
  for (const auto& set : sets)
    for (int64_t k : set) {
      ++cover_count[k];
      ++total_points;
    }
  std::vector<int64_t> offset(n + 2, 0);
  for (int64_t k = 1; k <= n; ++k)
    offset[k + 1] = offset[k] + cover_count[k];
  std::vector<int32_t> covering(total_points);
  {
    std::vector<int64_t> cursor(offset.begin(), offset.end() - 1);
    for (int64_t i = 0; i < m; ++i)
      for (int64_t k : sets[i])
        covering[cursor[k]++] = static_cast<int32_t>(i);
  }

  std::map<std::pair<int32_t, int32_t>, std::vector<int64_t>> pair_points;
  for (int64_t k = 1; k <= n; ++k) {
    const int64_t lo = offset[k], hi = offset[k + 1];
    if (hi - lo < 2) continue;
    for (int64_t a = lo; a < hi; ++a) {
      for (int64_t b = a + 1; b < hi; ++b) {
        const int32_t i1 = covering[a], i2 = covering[b];
        out.x[k - 1] +=
            std::exp(c - (log_gamma[i1] + log_gamma[i2]) * inv_alpha);
        if (config.record_pairs) pair_points[{i1, i2}].push_back(k);
      }
    }
  }
  if (config.record_pairs) {
    for (auto& [key, points] : pair_points) {
      ContributingPair p;
      p.i1 = key.first + 1;
      p.i2 = key.second + 1;
      p.points = std::move(points);
      out.pairs.push_back(std::move(p));
    }
  }
  return out;
}

PathSample simulate_path(const SeriesConfig& config, uint64_t replication) {
  RngStream rng(config.seed, replication, StreamLabel::kPath);
  return simulate_path(config, rng);
}

double partial_sum(const PathSample& path, double alpha, int64_t n) {
  if (path.x.size() != n)
    throw std::invalid_argument("partial_sum: path length mismatch");
  return path.x.sum() / scaling_b(n, alpha);
}

void write_path_csv(const PathSample& path, std::ostream& os) {
  os << "k,x_k\n";
  char buf[64];
  for (int64_t k = 0; k < path.x.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g\n",
                  static_cast<long long>(k + 1), path.x[k]);
    os << buf;
  }
}

void write_path_binary(const PathSample& path, std::ostream& os) {
  const int64_t n = path.x.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof(n));
  os.write(reinterpret_cast<const char*>(path.x.data()),
           static_cast<std::streamsize>(sizeof(double) * n));
}

uint64_t path_digest(const PathSample& path) {
  // FNV-1a over the raw bytes of x.
  uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(path.x.data());
  const size_t len = sizeof(double) * static_cast<size_t>(path.x.size());
  for (size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

void write_manifest_line(uint64_t seed, uint64_t rep, const PathSample& path,
                         std::ostream& os) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "{\"seed\":%llu,\"rep\":%llu,\"digest\":\"%016llx\"}\n",
                static_cast<unsigned long long>(seed),
                static_cast<unsigned long long>(rep),
                static_cast<unsigned long long>(path_digest(path)));
  os << buf;
}

}  // namespace srlab
