#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace predprey {

// SplitMix64 finalizer. Used only to mix seeds and tags into Philox keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// FNV-1a over the experiment tag bytes.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw; SC'11).
// Matches the reference known-answer vectors; see the rng test suite.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += W0;
      key[1] += W1;
    }
    const std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
    const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

// Quantile of the standard normal (Wichura's AS241, double-precision branch).
// Accurate to ~1 ulp across (0,1); validated against an external reference.
double inverse_normal_cdf(double p);

// Counter-based random stream. The key identifies the (seed, experiment)
// pair, the high counter words identify the path, and the low counter words
// advance block by block, so any draw is a pure function of
// (master_seed, experiment_tag, path_index, position). Streams for distinct
// triples never share Philox inputs.
class RngStream {
 public:
  RngStream(std::array<std::uint32_t, 2> key, std::uint64_t path_index)
      : ctr_{0u, 0u, std::uint32_t(path_index), std::uint32_t(path_index >> 32)},
        key_(key) {}

  std::uint32_t next_u32() {
    if (have_ == 0) {
      buf_ = philox4x32(ctr_, key_);
      if (++ctr_[0] == 0) ++ctr_[1];
      have_ = 4;
    }
    return buf_[4 - have_--];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on the open interval (0,1): 53 random bits centered in the cell.
  double uniform_open01() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on (0,1]; used for exponential waiting times so log() stays finite.
  double uniform_openclosed01() {
    return (double(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via the inverse CDF (stream-stable: one uniform per draw).
  double normal() { return inverse_normal_cdf(uniform_open01()); }

 private:
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> buf_{};
  int have_ = 0;
};

// Deterministic stream derivation; the reproducibility contract of the whole
// Monte Carlo layer reduces to this function.
inline RngStream derive_stream(std::uint64_t master_seed, std::string_view experiment_tag,
                               std::uint64_t path_index) {
  const std::uint64_t k = splitmix64(master_seed ^ splitmix64(fnv1a64(experiment_tag)));
  return RngStream({std::uint32_t(k), std::uint32_t(k >> 32)}, path_index);
}

}  // namespace predprey
