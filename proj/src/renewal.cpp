#include "srlab/renewal.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace srlab {

namespace {

constexpr double kNegativityTolerance = 1e-12;
constexpr int64_t kGapBeyondAnyHorizon = int64_t{1} << 61;

// Chunked dot product: SIMD-friendly inner segments combined in extended
// precision, so residual checks do not share the build's rounding order.
long double chunked_dot(const double* a, const double* b, int64_t n) {
  constexpr int64_t kChunk = 4096;
  long double total = 0.0L;
  for (int64_t i = 0; i < n; i += kChunk) {
    const int64_t len = std::min(kChunk, n - i);
    total += Eigen::Map<const Eigen::VectorXd>(a + i, len)
                 .dot(Eigen::Map<const Eigen::VectorXd>(b + i, len));
  }
  return total;
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Self-referential convolution recursion
//   out[n] = base[n] + sign * sum_{j=0}^{n-1} out[j] * ker[n-j],  n = 1..N,
// with out[0] preset by the caller. Divide-and-conquer evaluation: cross-block
// contributions are added by FFT convolution, leaves finish directly.
class ConvolutionRecursion {
 public:
  ConvolutionRecursion(const Eigen::VectorXd& ker, const Eigen::VectorXd& base,
                       double sign, Eigen::VectorXd& out)
      : ker_(ker), base_(base), sign_(sign), out_(out), acc_(out.size()) {
    acc_.setZero();
  }

  void run() { solve(0, out_.size()); }

 private:
  void solve(int64_t l, int64_t r) {
    constexpr int64_t kLeaf = 256;
    if (r - l <= kLeaf) {
      for (int64_t n = l; n < r; ++n) {
        if (n == 0) continue;
        double inner = 0.0;
        for (int64_t j = std::max<int64_t>(l, 0); j < n; ++j)
          inner += out_[j] * ker_[n - j];
        out_[n] = base_[n] + sign_ * (acc_[n] + inner);
      }
      return;
    }
    const int64_t mid = l + (r - l) / 2;
    solve(l, mid);
    add_cross(l, mid, r);
    solve(mid, r);
  }

  // acc[n] += sum_{j=l}^{mid-1} out[j] * ker[n-j] for n in [mid, r)
  void add_cross(int64_t l, int64_t mid, int64_t r) {
    const int64_t h = mid - l;
    const int64_t span = r - l;
    const size_t fft_size = next_pow2(static_cast<size_t>(h + span - 1));
    const auto& kf = kernel_fft(span, fft_size);

    std::vector<std::complex<double>> af(fft_size);
    {
      std::vector<double> a(fft_size, 0.0);
      std::copy(out_.data() + l, out_.data() + mid, a.begin());
      fft_.fwd(af, a);
    }
    for (size_t i = 0; i < fft_size; ++i) af[i] *= kf[i];
    std::vector<double> c;
    fft_.inv(c, af);
    for (int64_t s = h; s < span; ++s) acc_[l + s] += c[s];
  }

  const std::vector<std::complex<double>>& kernel_fft(int64_t span,
                                                      size_t fft_size) {
    auto it = kernel_cache_.find(span);
    if (it != kernel_cache_.end()) return it->second;
    std::vector<double> k(fft_size, 0.0);
    for (int64_t t = 1; t < span && t < ker_.size(); ++t) k[t] = ker_[t];
    std::vector<std::complex<double>> kf(fft_size);
    fft_.fwd(kf, k);
    return kernel_cache_.emplace(span, std::move(kf)).first->second;
  }

  const Eigen::VectorXd& ker_;
  const Eigen::VectorXd& base_;
  double sign_;
  Eigen::VectorXd& out_;
  Eigen::VectorXd acc_;
  Eigen::FFT<double> fft_;
  std::unordered_map<int64_t, std::vector<std::complex<double>>> kernel_cache_;
};

// u[n] = sum_{k=1..n} f[k] u[n-k] with a reversed shadow copy so the inner
// product runs over two forward-contiguous ranges.
Eigen::VectorXd build_u_direct(const Eigen::VectorXd& f, int64_t N) {
  Eigen::VectorXd u(N + 1), ur(N + 1);
  u[0] = 1.0;
  ur[N] = 1.0;
  for (int64_t n = 1; n <= N; ++n) {
    const double s = f.segment(1, n).dot(ur.segment(N - n + 1, n));
    u[n] = s;
    ur[N - n] = s;
  }
  return u;
}

Eigen::VectorXd build_u_fft(const Eigen::VectorXd& f, int64_t N) {
  Eigen::VectorXd u(N + 1);
  Eigen::VectorXd base = Eigen::VectorXd::Zero(N + 1);
  u[0] = 1.0;
  ConvolutionRecursion rec(f, base, +1.0, u);
  rec.run();
  return u;
}

// fstar[n] = v[n] - sum_{k=1..n-1} fstar[k] v[n-k], clamped at tiny negative
// values produced by double-precision cancellation.
Eigen::VectorXd deconvolve_fstar_direct(const Eigen::VectorXd& v, int64_t N,
                                        int64_t& clamps) {
  Eigen::VectorXd fs(N + 1), vr(N + 1);
  for (int64_t k = 0; k <= N; ++k) vr[N - k] = v[k];
  fs[0] = 0.0;
  for (int64_t n = 1; n <= N; ++n) {
    double s = 0.0;
    if (n >= 2) s = fs.segment(1, n - 1).dot(vr.segment(N - n + 1, n - 1));
    double val = v[n] - s;
    if (val < 0.0) {
      if (val < -kNegativityTolerance)
        throw numerical_error("deconvolution produced fstar(" +
                              std::to_string(n) + ") = " +
                              std::to_string(val));
      val = 0.0;
      ++clamps;
    }
    fs[n] = val;
  }
  return fs;
}

Eigen::VectorXd deconvolve_fstar_fft(const Eigen::VectorXd& v, int64_t N,
                                     int64_t& clamps) {
  Eigen::VectorXd fs(N + 1);
  fs[0] = 0.0;
  ConvolutionRecursion rec(v, v, -1.0, fs);
  rec.run();
  for (int64_t n = 1; n <= N; ++n) {
    if (fs[n] < 0.0) {
      if (fs[n] < -kNegativityTolerance)
        throw numerical_error("deconvolution produced fstar(" +
                              std::to_string(n) + ") = " +
                              std::to_string(fs[n]));
      fs[n] = 0.0;
      ++clamps;
    }
  }
  return fs;
}

}  // namespace

RenewalLaw::RenewalLaw(double beta) : beta_(beta), inv_beta_(1.0 / beta) {
  if (!(beta > 0.0 && beta < 0.5))
    throw std::invalid_argument("beta must lie in the open interval (0, 1/2)");
}

int64_t RenewalLaw::quantile_from_tail(double v) const {
  if (!(v > 0.0 && v < 1.0))
    throw std::invalid_argument("tail quantile argument must be in (0,1)");
  const double y = std::pow(v, -inv_beta_);  // boundary: F̄(t) <= v iff t+1 >= y
  if (y >= static_cast<double>(kGapBeyondAnyHorizon))
    return kGapBeyondAnyHorizon;
  int64_t t = static_cast<int64_t>(std::ceil(y)) - 1;
  if (t < 1) t = 1;
  while (tail(t) > v) ++t;
  while (t > 1 && tail(t - 1) <= v) --t;
  return t;
}

RenewalTables build_tables(const RenewalLaw& law, int64_t N,
                           TableBuildMethod method) {
  if (N < 2) throw std::invalid_argument("table horizon N must be >= 2");
  const double beta = law.beta();

  const bool use_fft = method == TableBuildMethod::kFft ||
                       (method == TableBuildMethod::kAuto && N > 200000);

  Eigen::VectorXd f(N + 1);
  f[0] = 0.0;
  for (int64_t k = 1; k <= N; ++k) f[k] = law.mass(k);

  RenewalTables t;
  t.beta = beta;
  t.horizon = N;
  t.asym_const = 1.0 / (std::tgamma(beta) * std::tgamma(1.0 - beta));

  t.u = use_fft ? build_u_fft(f, N) : build_u_direct(f, N);
  for (int64_t n = 1; n <= N; ++n) {
    if (t.u[n] < 0.0) {
      if (t.u[n] < -kNegativityTolerance)
        throw numerical_error("renewal recursion produced u(" +
                              std::to_string(n) + ") < 0");
      t.u[n] = 0.0;
      ++t.negativity_clamps;
    }
  }

  t.v = t.u.array().square();

  t.fstar = use_fft ? deconvolve_fstar_fft(t.v, N, t.negativity_clamps)
                    : deconvolve_fstar_direct(t.v, N, t.negativity_clamps);

  t.fbar_star.resize(N + 1);
  {
    long double cum = 1.0L;
    t.fbar_star[0] = 1.0;
    for (int64_t j = 1; j <= N; ++j) {
      cum -= t.fstar[j];
      t.fbar_star[j] = static_cast<double>(cum);
    }
  }

  t.w.resize(N + 2);
  {
    long double cum = 0.0L;
    t.w[0] = 0.0;
    for (int64_t n = 1; n <= N + 1; ++n) {
      cum += law.tail(n - 1);
      t.w[n] = static_cast<double>(cum);
    }
  }

  // qF2 = 1 / sum_k u(k)^2 with the slowly converging tail replaced by its
  // power-law integral. The stored error bound dominates |F̄*(N) - qF2|:
  // F̄*(N) - qF2 = sum_{j>N} fstar(j) + (qF2_true - qF2), the first term is
  // at most sum_{k>N} v(k) because fstar(k) <= v(k) termwise, and the second
  // is smaller by a factor qF2^2 * (relative tail error). The measured
  // deviation of u from its asymptote, inflated 5x, absorbs the analytic
  // tail's own error.
  {
    long double s = 0.0L;
    for (int64_t k = 0; k <= N; ++k) s += t.v[k];
    t.tail_correction = t.asym_const * t.asym_const *
                        std::pow(static_cast<double>(N), 2.0 * beta - 1.0) /
                        (1.0 - 2.0 * beta);
    t.qf2 = 1.0 / static_cast<double>(s + t.tail_correction);

    double dev = 0.0;
    for (int64_t n : {N, N / 2, N / 4}) {
      const double ratio =
          t.u[n] / (t.asym_const * std::pow(static_cast<double>(n), beta - 1.0));
      dev = std::max(dev, std::abs(ratio - 1.0));
    }
    t.qf2_error_bound = t.tail_correction * (1.0 + 5.0 * dev) + 1e-9;
  }
  return t;
}

double RenewalTables::intersection_residual(int64_t L) const {
  if (L < 1) throw std::invalid_argument("residual horizon must be >= 1");
  const double analytic_beyond_horizon = tail_correction;
  if (L >= horizon) {
    return asym_const * asym_const *
           std::pow(static_cast<double>(L), 2.0 * beta - 1.0) /
           (1.0 - 2.0 * beta);
  }
  long double s = 0.0L;
  for (int64_t k = L + 1; k <= horizon; ++k) s += v[k];
  return static_cast<double>(s) + analytic_beyond_horizon;
}

int64_t RenewalTables::validated_tail_horizon(double eps_rel) const {
  if (!(eps_rel > 0.0)) throw std::invalid_argument("eps_rel must be > 0");
  const double target = eps_rel * qf2;
  // Residual beyond the table horizon follows the analytic power law; solve
  // for L directly and fall back to a table scan when L lands inside.
  const double c = asym_const * asym_const / (1.0 - 2.0 * beta);
  const double analytic_L = std::pow(target / c, 1.0 / (2.0 * beta - 1.0));
  if (analytic_L >= static_cast<double>(horizon)) {
    return static_cast<int64_t>(std::floor(analytic_L)) + 1;
  }
  int64_t lo = 1, hi = horizon;
  while (lo < hi) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (intersection_residual(mid) < target)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

double asymptotic_u(const RenewalTables& tables, int64_t n) {
  if (n < 1) throw std::invalid_argument("asymptotic_u requires n >= 1");
  return tables.asym_const *
         std::pow(static_cast<double>(n), tables.beta - 1.0);
}

double theta_rho(double beta, double rho, double qf2) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("rho must lie in [0,1]");
  return (1.0 - 2.0 * rho * beta) * qf2;
}

double scaling_b(int64_t n, double alpha) {
  if (n <= 1) throw std::invalid_argument("scaling_b requires n >= 2");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0,1]");
  const double nn = static_cast<double>(n);
  return std::pow(0.5 * nn * std::log(nn), 1.0 / alpha);
}

double renewal_identity_residual(const RenewalLaw& law,
                                 const RenewalTables& tables) {
  const int64_t N = tables.horizon;
  Eigen::VectorXd f(N + 1), ur(N + 1);
  f[0] = 0.0;
  for (int64_t k = 1; k <= N; ++k) f[k] = law.mass(k);
  for (int64_t k = 0; k <= N; ++k) ur[N - k] = tables.u[k];
  long double worst = 0.0L;
  for (int64_t n = 1; n <= N; ++n) {
    const long double s =
        chunked_dot(f.data() + 1, ur.data() + (N - n + 1), n);
    worst = std::max(worst, std::abs(s - (long double)tables.u[n]));
  }
  return static_cast<double>(worst);
}

double deconvolution_roundtrip_residual(const RenewalTables& tables) {
  const int64_t N = tables.horizon;
  Eigen::VectorXd vr(N + 1);
  for (int64_t k = 0; k <= N; ++k) vr[N - k] = tables.v[k];
  long double worst = 0.0L;
  for (int64_t n = 1; n <= N; ++n) {
    const long double s =
        chunked_dot(tables.fstar.data() + 1, vr.data() + (N - n + 1), n);
    worst = std::max(worst, std::abs(s - (long double)tables.v[n]));
  }
  return static_cast<double>(worst);
}

namespace {

void write_header_fields(const RenewalTables& t, std::ostream& os) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "beta=%.17g N=%lld qF2=%.17g qF2_error_bound=%.17g "
                "asym_const=%.17g tail_correction=%.17g clamps=%lld",
                t.beta, static_cast<long long>(t.horizon), t.qf2,
                t.qf2_error_bound, t.asym_const, t.tail_correction,
                static_cast<long long>(t.negativity_clamps));
  os << buf;
}

double parse_field(const std::string& line, const std::string& key) {
  const auto pos = line.find(key + "=");
  if (pos == std::string::npos)
    throw std::runtime_error("tables header missing field " + key);
  return std::strtod(line.c_str() + pos + key.size() + 1, nullptr);
}

void rebuild_w(RenewalTables& t) {
  const RenewalLaw law(t.beta);
  t.w.resize(t.horizon + 2);
  long double cum = 0.0L;
  t.w[0] = 0.0;
  for (int64_t n = 1; n <= t.horizon + 1; ++n) {
    cum += law.tail(n - 1);
    t.w[n] = static_cast<double>(cum);
  }
}

}  // namespace

void write_tables_csv(const RenewalTables& t, std::ostream& os) {
  os << "# srlab-tables ";
  write_header_fields(t, os);
  os << "\nk,u,v,fstar,Fbar_star\n";
  char buf[256];
  for (int64_t k = 0; k <= t.horizon; ++k) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(k), t.u[k], t.v[k], t.fstar[k],
                  t.fbar_star[k]);
    os << buf;
  }
}

RenewalTables read_tables_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# srlab-tables", 0) != 0)
    throw std::runtime_error("not an srlab tables CSV");
  RenewalTables t;
  t.beta = parse_field(line, "beta");
  t.horizon = static_cast<int64_t>(parse_field(line, "N"));
  t.qf2 = parse_field(line, "qF2");
  t.qf2_error_bound = parse_field(line, "qF2_error_bound");
  t.asym_const = parse_field(line, "asym_const");
  t.tail_correction = parse_field(line, "tail_correction");
  t.negativity_clamps = static_cast<int64_t>(parse_field(line, "clamps"));
  std::getline(is, line);  // column header
  const int64_t N = t.horizon;
  t.u.resize(N + 1);
  t.v.resize(N + 1);
  t.fstar.resize(N + 1);
  t.fbar_star.resize(N + 1);
  for (int64_t k = 0; k <= N; ++k) {
    if (!std::getline(is, line))
      throw std::runtime_error("tables CSV truncated at row " +
                               std::to_string(k));
    long long idx;
    double uu, vv, fs, fb;
    if (std::sscanf(line.c_str(), "%lld,%lg,%lg,%lg,%lg", &idx, &uu, &vv, &fs,
                    &fb) != 5 ||
        idx != k)
      throw std::runtime_error("malformed tables CSV row " +
                               std::to_string(k));
    t.u[k] = uu;
    t.v[k] = vv;
    t.fstar[k] = fs;
    t.fbar_star[k] = fb;
  }
  rebuild_w(t);
  return t;
}

namespace {
constexpr char kBinaryMagic[8] = {'S', 'R', 'L', 'T', 'B', 'L', '0', '1'};
}

void write_tables_binary(const RenewalTables& t, std::ostream& os) {
  os.write(kBinaryMagic, 8);
  const int64_t N = t.horizon;
  os.write(reinterpret_cast<const char*>(&N), sizeof(N));
  const double header[5] = {t.beta, t.qf2, t.qf2_error_bound, t.asym_const,
                            t.tail_correction};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  os.write(reinterpret_cast<const char*>(&t.negativity_clamps),
           sizeof(int64_t));
  const auto dump = [&](const Eigen::VectorXd& x) {
    os.write(reinterpret_cast<const char*>(x.data()),
             static_cast<std::streamsize>(sizeof(double) * x.size()));
  };
  dump(t.u);
  dump(t.v);
  dump(t.fstar);
  dump(t.fbar_star);
}

RenewalTables read_tables_binary(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kBinaryMagic, 8) != 0)
    throw std::runtime_error("not an srlab tables binary file");
  RenewalTables t;
  int64_t N = 0;
  is.read(reinterpret_cast<char*>(&N), sizeof(N));
  double header[5];
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  is.read(reinterpret_cast<char*>(&t.negativity_clamps), sizeof(int64_t));
  t.horizon = N;
  t.beta = header[0];
  t.qf2 = header[1];
  t.qf2_error_bound = header[2];
  t.asym_const = header[3];
  t.tail_correction = header[4];
  const auto slurp = [&](Eigen::VectorXd& x) {
    x.resize(N + 1);
    is.read(reinterpret_cast<char*>(x.data()),
            static_cast<std::streamsize>(sizeof(double) * x.size()));
  };
  slurp(t.u);
  slurp(t.v);
  slurp(t.fstar);
  slurp(t.fbar_star);
  if (!is) throw std::runtime_error("srlab tables binary file truncated");
  rebuild_w(t);
  return t;
}

void save_tables(const RenewalTables& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    write_tables_csv(t, os);
  else
    write_tables_binary(t, os);
}

RenewalTables load_tables(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return read_tables_csv(is);
  return read_tables_binary(is);
}

}  // namespace srlab
