#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "srlab/rng.hpp"

using namespace srlab;

TEST_CASE("philox4x32-10 known answers") {
  // Reference vectors from the Random123 distribution.
  uint32_t out[4];
  {
    const uint32_t ctr[4] = {0, 0, 0, 0};
    const uint32_t key[2] = {0, 0};
    detail::philox4x32_10(ctr, key, out);
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const uint32_t ctr[4] = {0xffffffffu, 0xffffffffu, 0xffffffffu,
                             0xffffffffu};
    const uint32_t key[2] = {0xffffffffu, 0xffffffffu};
    detail::philox4x32_10(ctr, key, out);
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    const uint32_t ctr[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                             0x03707344u};
    const uint32_t key[2] = {0xa4093822u, 0x299f31d0u};
    detail::philox4x32_10(ctr, key, out);
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("streams are deterministic and address-separated") {
  RngStream a(42, 7, StreamLabel::kPath);
  RngStream b(42, 7, StreamLabel::kPath);
  RngStream c(42, 8, StreamLabel::kPath);
  RngStream d(42, 7, StreamLabel::kTailProcess);
  RngStream e(43, 7, StreamLabel::kPath);
  bool same_rep = true, diff_rep = false, diff_label = false, diff_seed = false;
  for (int i = 0; i < 64; ++i) {
    const uint64_t x = a.next_u64();
    same_rep &= (x == b.next_u64());
    diff_rep |= (x != c.next_u64());
    diff_label |= (x != d.next_u64());
    diff_seed |= (x != e.next_u64());
  }
  CHECK(same_rep);
  CHECK(diff_rep);
  CHECK(diff_label);
  CHECK(diff_seed);
}

TEST_CASE("u01 lands strictly inside (0,1) with sane moments") {
  RngStream rng(1, 0, StreamLabel::kGeneric);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_u01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("exponential and geometric moments") {
  RngStream rng(9, 3, StreamLabel::kGeneric);
  const int n = 200000;
  double se = 0.0;
  double sg = 0.0;
  for (int i = 0; i < n; ++i) {
    se += rng.next_exponential();
    sg += static_cast<double>(rng.next_geometric(0.4));
  }
  CHECK(std::abs(se / n - 1.0) < 4.0 / std::sqrt(double(n)));
  // geometric mean 1/q = 2.5, sd = sqrt(1-q)/q
  CHECK(std::abs(sg / n - 2.5) < 4.0 * (std::sqrt(0.6) / 0.4) /
                                     std::sqrt(double(n)));
  CHECK(rng.next_geometric(1.0) == 1);
  CHECK_THROWS_AS(rng.next_geometric(0.0), std::invalid_argument);
}

TEST_CASE("rejects oversized replication index") {
  CHECK_THROWS_AS(RngStream(1, uint64_t{1} << 33, StreamLabel::kPath),
                  std::invalid_argument);
}
