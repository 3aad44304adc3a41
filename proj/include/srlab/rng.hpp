#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al., SC 2011).
//
// Every stream is addressed by (seed, replication, label). Streams with
// distinct addresses are disjoint by construction, so replications can be
// generated on any number of workers, in any order, with identical results.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace srlab {

namespace detail {

struct PhiloxState {
  uint32_t counter[4];
  uint32_t key[2];
};

inline void philox_round(uint32_t c[4], const uint32_t k[2]) {
  constexpr uint64_t kMulA = 0xD2511F53u;
  constexpr uint64_t kMulB = 0xCD9E8D57u;
  const uint64_t prod0 = kMulA * c[0];
  const uint64_t prod1 = kMulB * c[2];
  const uint32_t hi0 = static_cast<uint32_t>(prod0 >> 32);
  const uint32_t lo0 = static_cast<uint32_t>(prod0);
  const uint32_t hi1 = static_cast<uint32_t>(prod1 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(prod1);
  const uint32_t r0 = hi1 ^ c[1] ^ k[0];
  const uint32_t r1 = lo1;
  const uint32_t r2 = hi0 ^ c[3] ^ k[1];
  const uint32_t r3 = lo0;
  c[0] = r0;
  c[1] = r1;
  c[2] = r2;
  c[3] = r3;
}

inline void philox4x32_10(const uint32_t counter[4], const uint32_t key[2],
                          uint32_t out[4]) {
  constexpr uint32_t kWeylA = 0x9E3779B9u;
  constexpr uint32_t kWeylB = 0xBB67AE85u;
  uint32_t c[4] = {counter[0], counter[1], counter[2], counter[3]};
  uint32_t k[2] = {key[0], key[1]};
  for (int round = 0; round < 10; ++round) {
    if (round != 0) {
      k[0] += kWeylA;
      k[1] += kWeylB;
    }
    philox_round(c, k);
  }
  out[0] = c[0];
  out[1] = c[1];
  out[2] = c[2];
  out[3] = c[3];
}

}  // namespace detail

// Substream labels: one per independent purpose within a replication.
enum class StreamLabel : uint32_t {
  kPath = 1,
  kTailProcess = 2,
  kHitProbe = 3,
  kLimitProcess = 4,
  kGeneric = 5,
};

class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t replication, StreamLabel label)
      : RngStream(seed, replication, static_cast<uint32_t>(label)) {}

  RngStream(uint64_t seed, uint64_t replication, uint32_t label) {
    if (replication > 0xFFFFFFFFull)
      throw std::invalid_argument("replication index exceeds 2^32-1");
    key_[0] = static_cast<uint32_t>(seed);
    key_[1] = static_cast<uint32_t>(seed >> 32);
    rep_ = static_cast<uint32_t>(replication);
    label_ = label;
  }

  uint64_t next_u64() {
    if (idx_ >= 4) refill();
    const uint64_t lo = out_[idx_];
    const uint64_t hi = out_[idx_ + 1];
    idx_ += 2;
    return lo | (hi << 32);
  }

  // Uniform on (0,1): (i + 1/2) / 2^53 over the top 53 bits, never 0 or 1.
  double next_u01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_exponential() { return -std::log(next_u01()); }

  // Geometric on {1,2,...} with success probability q: P(G=k)=(1-q)^{k-1} q.
  int64_t next_geometric(double q) {
    if (!(q > 0.0 && q <= 1.0))
      throw std::invalid_argument("geometric parameter must be in (0,1]");
    if (q == 1.0) return 1;
    const double g = std::ceil(std::log(next_u01()) / std::log1p(-q));
    return g < 1.0 ? 1 : static_cast<int64_t>(g);
  }

 private:
  void refill() {
    const uint32_t counter[4] = {static_cast<uint32_t>(block_),
                                 static_cast<uint32_t>(block_ >> 32), rep_,
                                 label_};
    detail::philox4x32_10(counter, key_, out_);
    ++block_;
    idx_ = 0;
  }

  uint32_t key_[2];
  uint32_t rep_;
  uint32_t label_;
  uint64_t block_ = 0;
  uint32_t out_[4] = {0, 0, 0, 0};
  int idx_ = 4;
};

}  // namespace srlab
