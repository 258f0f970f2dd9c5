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

#include <catch2/catch_amalgamated.hpp>

#include "bqp/rng.hpp"

using namespace bqp;

// Frozen test vectors: the generator with key K must emit the SplitMix64
// sequence seeded with K. Values computed from the reference SplitMix64
// definition (Steele, Lea & Flood 2014) independently of rng.hpp.
namespace {
std::uint64_t reference_splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace

TEST_CASE("counter rng matches the splitmix64 reference sequence") {
  for (std::uint64_t key : {0ull, 42ull, 0xDEADBEEFull, 0xFFFFFFFFFFFFFFFFull}) {
    CounterRng rng(key);
    std::uint64_t state = key;
    for (int i = 0; i < 100; ++i) REQUIRE(rng.next_u64() == reference_splitmix64(state));
  }
}

TEST_CASE("frozen vectors for key 0") {
  CounterRng rng(0);
  REQUIRE(rng.next_u64() == 0xE220A8397B1DCDAFull);
  REQUIRE(rng.next_u64() == 0x6E789E6AA1B965F4ull);
  REQUIRE(rng.next_u64() == 0x06C45D188009454Full);
}

TEST_CASE("u01 stays in [0,1) and is deterministic") {
  CounterRng a(7), b(7);
  for (int i = 0; i < 1000; ++i) {
    double u = a.next_u01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(u == b.next_u01());
  }
}

TEST_CASE("derived keys differ per stream and per tag") {
  REQUIRE(derive_key(1, std::uint64_t{0}) != derive_key(1, std::uint64_t{1}));
  REQUIRE(derive_key(1, std::uint64_t{0}) != derive_key(2, std::uint64_t{0}));
  REQUIRE(derive_key(5, "eval") != derive_key(5, std::uint64_t{0}));
  REQUIRE(derive_key(5, "eval") == derive_key(5, "eval"));
}

TEST_CASE("triangular draws respect support and mode skew") {
  CounterRng rng(11);
  double lo = 1.0, mode = 2.0, hi = 5.0;
  double sum = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double v = rng.triangular(lo, mode, hi);
    REQUIRE(v >= lo);
    REQUIRE(v <= hi);
    sum += v;
  }
  // Mean of a triangular is (lo+mode+hi)/3.
  REQUIRE(sum / n == Catch::Approx((lo + mode + hi) / 3.0).margin(0.03));
}

TEST_CASE("normal has roughly the requested moments") {
  CounterRng rng(13);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal(10.0, 2.0);
    sum += v;
    sq += v * v;
  }
  double mean = sum / n;
  REQUIRE(mean == Catch::Approx(10.0).margin(0.05));
  REQUIRE(sq / n - mean * mean == Catch::Approx(4.0).margin(0.15));
}
