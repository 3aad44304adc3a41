#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "srlab/estimators.hpp"

using namespace srlab;

TEST_CASE("block scheme arithmetic") {
  const BlockScheme a = make_block_scheme(1000, 0.5);
  CHECK(a.d == 31);
  CHECK(a.k == 32);
  const BlockScheme b = make_block_scheme(100000, 0.2);
  CHECK(b.d == 10);
  CHECK(b.k == 10000);
  const BlockScheme c = make_block_scheme(1000, 1.0);
  CHECK(c.d == 1000);
  CHECK(c.k == 1);
  CHECK_THROWS_AS(make_block_scheme(2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_block_scheme(1000, 1.5), std::invalid_argument);

  const BlockScheme lg = make_log_block_scheme(100000);
  CHECK(lg.d == 8685);
  CHECK(lg.k == 11);
}

TEST_CASE("block maxima and exceedance counting") {
  Eigen::VectorXd x(10);
  x << 0, 1, 5, 0, 0, 0, 2, 7, 0, 1;
  BlockScheme s;
  s.n = 10;
  s.rho = 0.5;
  s.d = 5;
  s.k = 2;
  const Eigen::VectorXd m = block_maxima(x, s);
  CHECK(m[0] == 5);
  CHECK(m[1] == 7);
  CHECK(count_exceeding_blocks(x, s, 4.0) == 2);
  CHECK(count_exceeding_blocks(x, s, 6.0) == 1);
  CHECK(count_exceeding_blocks(x, s, 10.0) == 0);
}

TEST_CASE("block rate record: estimate, ses, target") {
  BlockScheme s;
  s.n = 100;
  s.rho = 0.5;
  s.d = 10;
  s.k = 10;
  std::vector<int64_t> counts = {0, 1, 0, 2, 1, 0, 0, 1, 0, 1};
  const EstimateRecord r = block_rate_record(counts, s, 1.0, 0.7, 0.3, 0.5);
  CHECK(r.estimate == doctest::Approx(0.6));
  CHECK(r.target == doctest::Approx((1.0 - 2.0 * 0.5 * 0.3) * 0.5));
  CHECK(r.se > 0.0);
  CHECK(r.clustered_se > 0.0);
  CHECK(r.count == 10);

  // zero exceedances: degenerate flag
  std::vector<int64_t> zeros(10, 0);
  const EstimateRecord rz = block_rate_record(zeros, s, 4.0, 0.7, 0.3, 0.5);
  CHECK(rz.estimate == 0.0);
  CHECK(rz.target_provenance.find("degenerate") != std::string::npos);

  BlockScheme bad = s;
  bad.d = 1;
  CHECK_THROWS_AS(block_rate_record(counts, bad, 1.0, 0.7, 0.3, 0.5),
                  std::invalid_argument);
}

TEST_CASE("running max cdf records") {
  std::vector<double> maxima = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> grid = {2.5, 100.0};
  const auto rows = running_max_cdf_records(maxima, 0.7, 0.2, grid, 1.0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].estimate == doctest::Approx(0.5));
  CHECK(rows[1].estimate == doctest::Approx(1.0));
  CHECK(rows[1].target ==
        doctest::Approx(std::exp(-0.2 * std::pow(100.0, -0.7))));
  // monotone in the grid
  CHECK(rows[0].estimate <= rows[1].estimate);
}

TEST_CASE("extract clusters: shapes and flatness") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(20);
  x[2] = 5.0;
  x[4] = 5.0;   // flat two-spike cluster in block 1
  x[13] = 8.0;  // single spike in block 2
  BlockScheme s;
  s.n = 20;
  s.d = 10;
  s.k = 2;
  s.rho = 0.5;
  const auto clusters = extract_clusters(x, s, 1.0);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].block == 1);
  CHECK(clusters[0].offsets == std::vector<int64_t>{0, 2});
  CHECK(clusters[0].flatness == doctest::Approx(1.0));
  CHECK(clusters[1].offsets == std::vector<int64_t>{0});
  CHECK(clusters[1].block_max == 8.0);
  const auto none = extract_clusters(x, s, 100.0);
  CHECK(none.empty());
  CHECK_THROWS_AS(extract_clusters(x, s, 0.0), std::invalid_argument);
}

TEST_CASE("finite block constant") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables t = build_tables(law, 20000);
  CHECK(finite_block_constant(t, 1) == 1.0);
  CHECK(finite_block_constant(t, 2) ==
        doctest::Approx(1.0 + t.fbar_star[1]).epsilon(1e-15));
  // value/d decreases toward qF2
  const double r100 = finite_block_constant(t, 100) / 100.0;
  const double r10000 = finite_block_constant(t, 10000) / 10000.0;
  CHECK(r100 > r10000);
  CHECK(r10000 > t.qf2);
  CHECK_THROWS_AS(finite_block_constant(t, 0), std::invalid_argument);
  CHECK_THROWS_AS(finite_block_constant(t, 30000), std::invalid_argument);
}

TEST_CASE("candidate index record") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables t = build_tables(law, 20000);
  const EstimateRecord all_isolated = candidate_index_record(100, 100, 1000, t);
  CHECK(all_isolated.estimate == 1.0);
  const EstimateRecord r = candidate_index_record(55, 100, 1000, t);
  CHECK(r.estimate == doctest::Approx(0.55));
  CHECK(r.target == t.qf2);
  CHECK(r.target_provenance.find("bias") != std::string::npos);
}

TEST_CASE("two-sided identity: pmf sums to one and chi2 behaves") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables t = build_tables(law, 20000);
  const double q = t.qf2;
  // sum_m m (1-q)^(m-1) q^2 = 1
  long double total = 0.0L;
  for (int m = 1; m < 4000; ++m)
    total += (long double)(m)*std::pow(1.0 - q, m - 1) * q * q;
  CHECK(static_cast<double>(total) == doctest::Approx(1.0).epsilon(1e-10));

  // histogram drawn from the law itself passes
  std::map<int64_t, int64_t> hist;
  RngStream rng(17, 0, StreamLabel::kGeneric);
  const int reps = 200000;
  for (int i = 0; i < reps; ++i) {
    const int64_t m =
        rng.next_geometric(q) + rng.next_geometric(q) - 1;  // N + N' - 1
    ++hist[m];
  }
  const EstimateRecord ok = two_sided_count_identity(hist, t);
  CHECK(ok.estimate > 0.01);
  // histogram from a plain geometric fails
  std::map<int64_t, int64_t> bad;
  for (int i = 0; i < reps; ++i) ++bad[rng.next_geometric(q)];
  const EstimateRecord fail = two_sided_count_identity(bad, t);
  CHECK(fail.estimate < 1e-6);
}

TEST_CASE("geometric gof record") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables t = build_tables(law, 20000);
  std::map<int64_t, int64_t> hist;
  RngStream rng(18, 0, StreamLabel::kGeneric);
  for (int i = 0; i < 100000; ++i) ++hist[rng.next_geometric(t.qf2)];
  const EstimateRecord ok = geometric_gof_record(hist, t.qf2, "gof");
  CHECK(ok.estimate > 0.01);
  const EstimateRecord off = geometric_gof_record(hist, t.qf2 * 0.8, "gof");
  CHECK(off.estimate < 1e-4);
}

TEST_CASE("hit probability identity at small scale") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables t = build_tables(law, 2048);
  const auto rows = hit_probability_check(law, t, 512, 32, 100000, 99);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].name == "hitprob_single");
  CHECK(std::abs(rows[0].z) < 4.0);
  CHECK(rows[2].name == "hitprob_pair");
  CHECK(std::abs(rows[2].z) < 4.0);
  // exact values independently recomputed
  CHECK(rows[0].target == doctest::Approx(t.w[32] / t.w[512]).epsilon(1e-12));
  long double fb = 0.0L;
  for (int j = 0; j < 32; ++j) fb += t.fbar_star[j];
  CHECK(rows[2].target ==
        doctest::Approx(double(fb) / (t.w[512] * t.w[512])).epsilon(1e-12));
  CHECK_THROWS_AS(hit_probability_check(law, t, 512, 1024, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("ac window counts") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(100);
  x[10] = 5.0;
  x[40] = 5.0;
  // conditioning at 10 with d=40: window [10+20, 10+40] contains 40 -> hit
  const AcCounts c = ac_window_counts(x, 40, 20, 4.0, 4.0);
  CHECK(c.events == 2);  // positions 10 and 40 both have full windows
  CHECK(c.hits == 1);
  // empty window convention: m_lag >= d
  const AcCounts empty = ac_window_counts(x, 40, 40, 4.0, 4.0);
  CHECK(empty.events == 0);
  CHECK(empty.hits == 0);
  // x -> infinity: no hits
  const AcCounts far = ac_window_counts(x, 40, 20, 1e12, 4.0);
  CHECK(far.hits == 0);
}

TEST_CASE("window marginal chi2 accepts flat counts and rejects skewed") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables t = build_tables(law, 512);
  const int64_t n = 64;
  const int64_t draws = 200000;
  std::vector<int64_t> counts(n, 0);
  for (int64_t r = 0; r < draws; ++r) {
    RngStream rng(23, r, StreamLabel::kGeneric);
    const WindowSet s = sample_window_set(law, t, n, n, rng);
    for (int64_t p : s.points)
      if (p <= n) ++counts[p - 1];
  }
  const Chi2Result good = window_marginal_chi2(counts, draws, t, n);
  CHECK(good.pvalue > 0.01);

  std::vector<int64_t> skewed = counts;
  for (int64_t k = 0; k < n / 2; ++k)
    skewed[k] += static_cast<int64_t>(0.1 * double(counts[k]));
  const Chi2Result bad = window_marginal_chi2(skewed, draws, t, n);
  CHECK(bad.pvalue < 1e-4);
}
