#pragma once

// Discrete heavy-tailed renewal law and the exact numeric tables derived
// from it: the renewal mass function u, the two-fold intersection mass
// v = u^2, the intersection inter-arrival law (fstar, Fbar_star), partial
// sums w of the survival function, and the termination probability qF2 of
// the intersection of two independent renewal processes.

#include <Eigen/Dense>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace srlab {

// Raised when a recursion leaves the numerically meaningful regime
// (e.g. a deconvolution coefficient turns negative beyond tolerance).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inter-renewal law on {1,2,...} with survival F̄(k) = (1+k)^(-beta).
// The tail constant is 1 and beta must lie in (0, 1/2), so two independent
// copies share only finitely many renewal times.
class RenewalLaw {
 public:
  explicit RenewalLaw(double beta);

  double beta() const { return beta_; }

  // F̄(k) = P(T > k), defined for k >= 0 with F̄(0) = 1.
  double tail(int64_t k) const {
    return std::pow(1.0 + static_cast<double>(k), -beta_);
  }

  // f(k) = F̄(k-1) - F̄(k), k >= 1, evaluated without cancellation.
  double mass(int64_t k) const {
    const double kk = static_cast<double>(k);
    return std::pow(kk, -beta_) * -std::expm1(-beta_ * std::log1p(1.0 / kk));
  }

  double cdf(int64_t k) const { return 1.0 - tail(k); }

  // Smallest integer t >= 1 with F̄(t) <= v, i.e. the exact quantile of the
  // inter-renewal law at 1 - v. The closed form is adjusted against the
  // survival function so the result matches the definition bit-for-bit.
  int64_t quantile_from_tail(double v) const;

 private:
  double beta_;
  double inv_beta_;
};

inline RenewalLaw make_renewal_law(double beta) { return RenewalLaw(beta); }

enum class TableBuildMethod {
  kAuto,    // direct convolution for small horizons, blocked FFT for large
  kDirect,  // O(N^2) convolution recursions
  kFft,     // divide-and-conquer convolution, O(N log^2 N)
};

struct RenewalTables {
  double beta = 0.0;
  int64_t horizon = 0;  // N: tables cover indices 0..N

  Eigen::VectorXd u;          // u[n] = P(n is a renewal time), u[0] = 1
  Eigen::VectorXd v;          // v[n] = u[n]^2, intersection renewal mass
  Eigen::VectorXd fstar;      // intersection inter-arrival mass, fstar[0] = 0
  Eigen::VectorXd fbar_star;  // F̄*(j) = P(first common time after 0 is > j)
  Eigen::VectorXd w;          // w[n] = sum_{k<n} F̄(k), size N+2

  double qf2 = 0.0;              // 1 / sum_k u(k)^2, tail-corrected
  double qf2_error_bound = 0.0;  // bound on |F̄*(N) - qf2| (see build notes)
  double asym_const = 0.0;       // 1 / (Γ(beta) Γ(1-beta))
  double tail_correction = 0.0;  // analytic estimate of sum_{k>N} u(k)^2
  int64_t negativity_clamps = 0;

  // Residual sum_{k>L} u(k)^2: exact partial sums up to the horizon plus the
  // analytic power-law tail beyond it (valid for any L >= 1).
  double intersection_residual(int64_t L) const;

  // Smallest L with intersection_residual(L) < eps_rel * qf2. May exceed the
  // horizon, in which case the analytic tail alone determines it.
  int64_t validated_tail_horizon(double eps_rel = 1e-3) const;
};

// u(n) recursion: u(0)=1, u(n) = sum_{k=1..n} f(k) u(n-k); then v = u^2,
// fstar by deconvolution of v, F̄* as 1 - cumsum(fstar), and qF2 with an
// analytic correction for the truncated part of sum u^2.
RenewalTables build_tables(const RenewalLaw& law, int64_t N,
                           TableBuildMethod method = TableBuildMethod::kAuto);

// n^(beta-1) / (Γ(beta) Γ(1-beta)): the large-n approximation of u(n).
double asymptotic_u(const RenewalTables& tables, int64_t n);

// Block-scale constant (1 - 2 rho beta) * qF2, decreasing in rho on [0,1].
double theta_rho(double beta, double rho, double qf2);

// Marginal scaling level b_n = ((1/2) n log n)^(1/alpha), n >= 2.
double scaling_b(int64_t n, double alpha);

// Largest residual of the renewal identity |u(n) - sum f(k) u(n-k)| over
// 1 <= n <= N, accumulated in extended precision. Independent re-check of
// the build path (direct or FFT).
double renewal_identity_residual(const RenewalLaw& law,
                                 const RenewalTables& tables);

// Largest residual of |v(n) - sum_{k=1..n} fstar(k) v(n-k)| over 1 <= n <= N:
// reconvolving the deconvolved inter-arrival mass must reproduce v.
double deconvolution_roundtrip_residual(const RenewalTables& tables);

// Flat table formats. The CSV carries a single metadata line
// (beta, N, qF2, error bound) followed by k,u,v,fstar,Fbar_star rows;
// the binary format is the same content with a fixed-size header.
void write_tables_csv(const RenewalTables& tables, std::ostream& os);
RenewalTables read_tables_csv(std::istream& is);
void write_tables_binary(const RenewalTables& tables, std::ostream& os);
RenewalTables read_tables_binary(std::istream& is);

void save_tables(const RenewalTables& tables, const std::string& path);
RenewalTables load_tables(const std::string& path);

}  // namespace srlab
