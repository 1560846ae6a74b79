#pragma once

#include <cstdint>
#include <vector>

#include "cvzk/bits.hpp"

namespace cvzk {

/// Counter-based pseudorandom stream (splitmix64 finalizer over key+counter).
/// Streams derived via child() are independent; the same (seed, path) always
/// reproduces the same draws on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : key_(mix(seed ^ kDomain)) {}

  /// Derived stream for a labelled sub-task.
  Rng child(uint64_t label) const { return Rng(key_, mix(label ^ kChild)); }

  /// Canonical per-trial derivation: hash(seed, trial index).
  static Rng for_trial(uint64_t seed, uint64_t trial) {
    return Rng(seed).child(0x7261696cULL).child(trial);
  }

  uint64_t next_u64() { return mix(key_ + kGolden * ++ctr_); }
  uint32_t next_u32() { return static_cast<uint32_t>(next_u64() >> 32); }
  bool next_bit() { return next_u64() >> 63; }

  /// Unbiased draw in [0, n).
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do { v = next_u64(); } while (v >= limit);
    return v % n;
  }

  /// Double in [0, 1) with 53 bits of precision.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  BitVec bits(size_t nbits) {
    BitVec v(nbits);
    for (size_t i = 0; i < nbits; ++i) v.set(i, next_bit());
    return v;
  }

  std::vector<uint8_t> bytes(size_t n) {
    std::vector<uint8_t> out(n);
    for (auto& b : out) b = static_cast<uint8_t>(next_u64() >> 56);
    return out;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  Rng(uint64_t key, uint64_t tweak) : key_(mix(key ^ tweak)) {}

  static uint64_t mix(uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr uint64_t kDomain = 0x63767A6B2D726E67ULL;
  static constexpr uint64_t kChild = 0x6368696C64ULL;

  uint64_t key_;
  uint64_t ctr_ = 0;
};

}  // namespace cvzk
