#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "srlab/renewal.hpp"

using namespace srlab;

TEST_CASE("law rejects out-of-range beta") {
  CHECK_THROWS_AS(make_renewal_law(0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_renewal_law(0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_renewal_law(-0.1), std::invalid_argument);
  CHECK_NOTHROW(make_renewal_law(0.49));
}

TEST_CASE("law closed forms") {
  const RenewalLaw law = make_renewal_law(0.25);
  CHECK(law.tail(0) == 1.0);
  CHECK(law.tail(1) == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-15));
  CHECK(law.mass(1) ==
        doctest::Approx(1.0 - std::pow(2.0, -0.25)).epsilon(1e-15));
  // mass telescopes the survival differences
  const RenewalLaw law3 = make_renewal_law(0.3);
  CHECK(law3.tail(0) == 1.0);
  for (int64_t k = 1; k < 2000; k += 13) {
    CHECK(law3.mass(k) ==
          doctest::Approx(law3.tail(k - 1) - law3.tail(k)).epsilon(1e-13));
  }
}

TEST_CASE("mass sums to one through the survival function") {
  const RenewalLaw law = make_renewal_law(0.3);
  long double acc = 0.0L;
  for (int64_t k = 1; k <= 100000; ++k) acc += law.mass(k);
  CHECK(static_cast<double>(acc) ==
        doctest::Approx(1.0 - law.tail(100000)).epsilon(1e-12));
}

TEST_CASE("technical ratio k f(k)/Fbar(k) stays bounded") {
  const RenewalLaw law = make_renewal_law(0.45);
  double worst = 0.0;
  for (int64_t k = 1; k <= 200000; k = k < 100 ? k + 1 : k * 2) {
    worst = std::max(worst, double(k) * law.mass(k) / law.tail(k));
  }
  CHECK(worst < 1.0);  // ratio tends to beta < 1/2
}

TEST_CASE("u matches brute-force path enumeration") {
  // Frozen by enumerating all renewal-time compositions of n.
  const RenewalLaw law = make_renewal_law(0.25);
  const RenewalTables t = build_tables(law, 64, TableBuildMethod::kDirect);
  CHECK(t.u[0] == 1.0);
  CHECK(t.u[1] == doctest::Approx(0.1591035847462855).epsilon(1e-14));
  CHECK(t.u[2] == doctest::Approx(0.10637468028124042).epsilon(1e-14));
  CHECK(t.u[3] == doctest::Approx(0.082550550085877278).epsilon(1e-14));
  CHECK(t.u[6] == doctest::Approx(0.052286956946596554).epsilon(1e-13));

  const RenewalTables t3 =
      build_tables(make_renewal_law(0.3), 64, TableBuildMethod::kDirect);
  CHECK(t3.u[1] == doctest::Approx(0.18774760364376442).epsilon(1e-14));
  // u(2) = f(2) + f(1)^2
  const RenewalLaw l3 = make_renewal_law(0.3);
  CHECK(t3.u[2] == doctest::Approx(l3.mass(2) + l3.mass(1) * l3.mass(1))
                       .epsilon(1e-14));
}

TEST_CASE("table invariants at moderate horizon") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables t = build_tables(law, 20000, TableBuildMethod::kDirect);

  CHECK(t.u[0] == 1.0);
  CHECK((t.u.array() >= 0.0).all());
  CHECK((t.u.array() <= 1.0).all());
  CHECK(t.v[123] == t.u[123] * t.u[123]);
  CHECK(t.fbar_star[0] == 1.0);
  for (int64_t j = 1; j <= 20000; j += 7)
    CHECK(t.fbar_star[j] <= t.fbar_star[j - 1]);
  CHECK(t.qf2 > 0.0);
  CHECK(t.qf2 < 1.0);
  CHECK(t.fbar_star[20000] > t.qf2);

  // w increasing with w[1] = 1
  CHECK(t.w[0] == 0.0);
  CHECK(t.w[1] == 1.0);
  for (int64_t k = 1; k <= 20000; k += 11) CHECK(t.w[k + 1] > t.w[k]);

  CHECK(renewal_identity_residual(law, t) < 1e-12);
  CHECK(deconvolution_roundtrip_residual(t) < 1e-10);
}

TEST_CASE("fft build agrees with direct build") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables a = build_tables(law, 6000, TableBuildMethod::kDirect);
  const RenewalTables b = build_tables(law, 6000, TableBuildMethod::kFft);
  CHECK((a.u - b.u).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.fstar - b.fstar).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(a.qf2 == doctest::Approx(b.qf2).epsilon(1e-12));
  CHECK(renewal_identity_residual(law, b) < 1e-12);
}

TEST_CASE("asymptotic_u and ratio trend") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables t = build_tables(law, 100000);
  CHECK(asymptotic_u(t, 1) == doctest::Approx(t.asym_const));
  // 1/(Gamma(b)Gamma(1-b)) = sin(pi b)/pi
  CHECK(t.asym_const ==
        doctest::Approx(std::sin(M_PI * 0.3) / M_PI).epsilon(1e-14));
  const double r2 = t.u[100] / asymptotic_u(t, 100);
  const double r5 = t.u[100000] / asymptotic_u(t, 100000);
  CHECK(std::abs(r5 - 1.0) < 0.15);
  CHECK(std::abs(r5 - 1.0) < std::abs(r2 - 1.0));
  CHECK_THROWS_AS(asymptotic_u(t, 0), std::invalid_argument);
}

TEST_CASE("theta_rho") {
  CHECK(theta_rho(0.3, 0.0, 0.5) == 0.5);
  CHECK(theta_rho(0.25, 1.0, 0.4) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(theta_rho(1e-12, 0.7, 0.5) == doctest::Approx(0.5).epsilon(1e-9));
  // strictly decreasing in rho
  CHECK(theta_rho(0.3, 0.2, 0.5) > theta_rho(0.3, 0.5, 0.5));
  CHECK_THROWS_AS(theta_rho(0.3, -0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(theta_rho(0.3, 1.1, 0.5), std::invalid_argument);
}

TEST_CASE("scaling_b") {
  CHECK(scaling_b(2, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(scaling_b(50, 0.5) ==
        doctest::Approx(scaling_b(50, 1.0) * scaling_b(50, 1.0))
            .epsilon(1e-12));
  CHECK_THROWS_AS(scaling_b(1, 0.7), std::invalid_argument);
}

TEST_CASE("intersection residual and validated horizon") {
  const RenewalLaw law = make_renewal_law(0.3);
  const RenewalTables t = build_tables(law, 50000);
  const double r1 = t.intersection_residual(1000);
  const double r2 = t.intersection_residual(20000);
  CHECK(r1 > r2);
  CHECK(r2 > 0.0);
  // residual at L matches a direct partial sum + analytic tail
  long double direct = 0.0L;
  for (int64_t k = 1001; k <= 50000; ++k) direct += t.v[k];
  CHECK(r1 == doctest::Approx(static_cast<double>(direct) + t.tail_correction)
                  .epsilon(1e-12));
  const int64_t L = t.validated_tail_horizon(1e-3);
  CHECK(t.intersection_residual(L) < 1e-3 * t.qf2);
  if (L > 1)
    CHECK(t.intersection_residual(L - 1) >= 1e-3 * t.qf2 * (1.0 - 1e-9));
}

TEST_CASE("csv and binary round-trips") {
  const RenewalLaw law = make_renewal_law(0.27);
  const RenewalTables t = build_tables(law, 300);

  std::stringstream csv;
  write_tables_csv(t, csv);
  const RenewalTables back = read_tables_csv(csv);
  CHECK(back.horizon == t.horizon);
  CHECK(back.beta == t.beta);
  CHECK(back.qf2 == t.qf2);
  CHECK(back.qf2_error_bound == t.qf2_error_bound);
  CHECK((back.u - t.u).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.fstar - t.fstar).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.fbar_star - t.fbar_star).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.w - t.w).cwiseAbs().maxCoeff() == 0.0);

  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_tables_binary(t, bin);
  const RenewalTables back2 = read_tables_binary(bin);
  CHECK(back2.qf2 == t.qf2);
  CHECK((back2.u - t.u).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back2.v - t.v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build rejects tiny horizons") {
  CHECK_THROWS_AS(build_tables(make_renewal_law(0.3), 1),
                  std::invalid_argument);
}
