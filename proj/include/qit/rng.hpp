// Copyright 2026 The qit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace qit {

/// One step of splitmix64 (Vigna, public domain): advances `state` by the
/// golden-ratio increment and returns a fully avalanched 64-bit output.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless avalanche of a single 64-bit value (the splitmix64 output mix).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  std::uint64_t s = z;
  return splitmix64_next(s);
}

// Which member of a (p, q) distribution pair a draw touches. Codes past Q tag
// the library's metadata streams so they can never collide with sample
// substreams at the same index.
enum class Side : std::uint64_t { P = 0, Q = 1 };

inline constexpr std::uint64_t kStreamIndexSelect = 2;
inline constexpr std::uint64_t kStreamTruthCoin = 3;
inline constexpr std::uint64_t kStreamNeedlePick = 4;
inline constexpr std::uint64_t kStreamTrialSplit = 5;
inline constexpr std::uint64_t kStreamInstanceGen = 6;

/// Stable substream derivation: a chained avalanche hash of the tuple
/// (master_seed, index, side, epoch). Equal tuples always map to the same
/// stream seed and distinct tuples land on distinct streams (64-bit
/// avalanche), so a run's randomness is a pure function of its master seed
/// and not of scheduling or worker count. This mapping is part of the
/// reproducibility contract and must not change between releases.
constexpr std::uint64_t derive_substream(std::uint64_t master_seed, std::uint64_t index,
                                         std::uint64_t side, std::uint64_t epoch) noexcept {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ index);
  h = mix64(h ^ side);
  h = mix64(h ^ epoch);
  return h;
}

constexpr std::uint64_t derive_substream(std::uint64_t master_seed, std::uint64_t index,
                                         Side side, std::uint64_t epoch) noexcept {
  return derive_substream(master_seed, index, static_cast<std::uint64_t>(side), epoch);
}

/// xoshiro256** 1.0 (Blackman & Vigna, public domain), seeded from a single
/// 64-bit value through splitmix64 as its authors recommend. Satisfies
/// UniformRandomBitGenerator, so it can drive <random> distributions.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      word = splitmix64_next(sm);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double next_unit() noexcept {
    return static_cast<double>(operator()() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) {
    std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
    return dist(*this);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

/// Number of successes among `trials` Bernoulli(p) draws. Small batches use
/// one uniform per trial; larger ones defer to the standard library's exact
/// binomial sampler, which switches to an O(1)-expected-time rejection
/// method once trials * min(p, 1-p) is large. Batched draws reach ~1e5
/// trials per call in schedule sweeps.
inline std::uint64_t binomial_draw(Xoshiro256& rng, std::uint64_t trials, double p) {
  if (trials == 0 || p <= 0.0) {
    return 0;
  }
  if (p >= 1.0) {
    return trials;
  }
  if (trials < 64) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      hits += rng.next_unit() < p ? 1 : 0;
    }
    return hits;
  }
  std::binomial_distribution<long long> dist(static_cast<long long>(trials), p);
  return static_cast<std::uint64_t>(dist(rng));
}

}  // namespace qit
