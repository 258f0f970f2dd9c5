// Copyright 2026 The pelletflow Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BQP_RNG_HPP
#define BQP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace bqp {

// Counter-based generator: output_i = mix64(key + i * GOLDEN), i = 1, 2, ...
// mix64 is the SplitMix64 finalizer, so the stream for a given key equals the
// SplitMix64 sequence seeded with that key. Pure 64-bit integer arithmetic,
// identical on every platform. Test vectors live in tests/test_rng.cpp.
inline constexpr std::uint64_t kRngGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Derives an independent stream key from a parent key and a stream id.
inline constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t stream) {
  return mix64(key ^ mix64(stream + kRngGolden));
}

// FNV-1a 64-bit, used for string-tagged streams and input-file hashes.
inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline constexpr std::uint64_t derive_key(std::uint64_t key, std::string_view tag) {
  return derive_key(key, fnv1a64(tag));
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kRngGolden); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_u01(); }

  // Box-Muller; consumes exactly two raw draws per call.
  double normal(double mean, double stddev) {
    double u1 = next_u01();
    double u2 = next_u01();
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    return mean + stddev * z;
  }

  // Inverse-CDF triangular on [lo, hi] with the given mode; one raw draw.
  double triangular(double lo, double mode, double hi) {
    double u = next_u01();
    double fc = (hi > lo) ? (mode - lo) / (hi - lo) : 0.0;
    if (u < fc) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
    return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
  }

  bool bernoulli(double q) { return next_u01() < q; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bqp

#endif  // BQP_RNG_HPP
