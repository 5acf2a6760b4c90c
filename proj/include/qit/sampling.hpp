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
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qit/rng.hpp"
#include "qit/states.hpp"

namespace qit {

inline constexpr double kBiasTol = 1e-12;

/// Per-(index, side) draw accounting. `total` is the exact number of
/// Bernoulli samples taken; counts never decrease.
struct SampleLedger {
  std::vector<std::array<std::uint64_t, 2>> counts;
  std::uint64_t total = 0;

  void record(std::uint64_t index, Side side, std::uint64_t n) {
    counts[index][static_cast<std::size_t>(side)] += n;
    total += n;
  }

  void merge(const SampleLedger& other) {
    if (counts.size() != other.counts.size()) {
      throw std::invalid_argument("SampleLedger::merge: index spaces differ");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
      counts[i][0] += other.counts[i][0];
      counts[i][1] += other.counts[i][1];
    }
    total += other.total;
  }
};

/// Indexed sampling access to m binary distribution pairs (p_i, q_i) with
/// p_i = ((1+alpha_i)/2, (1-alpha_i)/2) and q_i likewise from beta_i.
///
/// Randomness contract: the batch of samples behind the e-th draw call for a
/// given (index, side) comes from the substream
/// derive_substream(master_seed, index, side, e), so outputs are a pure
/// function of (master seed, call sequence). Biases are computed on first
/// touch and cached; the fill is idempotent and safe under concurrent
/// readers, while draw() itself mutates the epoch counters and ledger and is
/// meant for one consumer per oracle instance.
class PairOracle {
 public:
  using BiasFn = std::function<std::pair<double, double>(std::uint64_t)>;

  PairOracle(std::uint64_t m, BiasFn bias_fn, std::uint64_t master_seed)
      : m_(m),
        master_seed_(master_seed),
        bias_fn_(std::move(bias_fn)),
        cache_mutex_(std::make_unique<std::mutex>()),
        cache_(m),
        filled_(m, 0),
        epochs_(m, {0, 0}) {
    if (m_ == 0) {
      throw std::invalid_argument("PairOracle: need at least one index");
    }
    ledger_.counts.assign(m_, {0, 0});
  }

  std::uint64_t size() const noexcept { return m_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }
  const SampleLedger& ledger() const noexcept { return ledger_; }

  /// (alpha_i, beta_i), clamped to [-1, 1] after a validity check.
  std::pair<double, double> biases(std::uint64_t index) const {
    check_index(index);
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    if (!filled_[index]) {
      auto [a, b] = bias_fn_(index);
      cache_[index] = {clamp_bias(a, index), clamp_bias(b, index)};
      filled_[index] = 1;
    }
    return cache_[index];
  }

  /// Draws `n` fresh samples from the chosen side of pair `index` and returns
  /// how many came out 0 (the outcome with probability (1+bias)/2).
  std::uint64_t draw(Side side, std::uint64_t index, std::uint64_t n) {
    check_index(index);
    const auto [alpha, beta] = biases(index);
    const double bias = side == Side::P ? alpha : beta;
    const std::uint64_t epoch = epochs_[index][static_cast<std::size_t>(side)]++;
    Xoshiro256 rng(derive_substream(master_seed_, index, side, epoch));
    const std::uint64_t hits = binomial_draw(rng, n, 0.5 * (1.0 + bias));
    ledger_.record(index, side, n);
    return hits;
  }

 private:
  void check_index(std::uint64_t index) const {
    if (index >= m_) {
      throw std::out_of_range("PairOracle: index out of range");
    }
  }

  static double clamp_bias(double b, std::uint64_t index) {
    if (std::abs(b) > 1.0 + kBiasTol) {
      throw std::domain_error("PairOracle: bias magnitude " + std::to_string(b) +
                              " exceeds 1 at index " + std::to_string(index));
    }
    return b < -1.0 ? -1.0 : (b > 1.0 ? 1.0 : b);
  }

  std::uint64_t m_;
  std::uint64_t master_seed_;
  BiasFn bias_fn_;
  mutable std::unique_ptr<std::mutex> cache_mutex_;
  mutable std::vector<std::pair<double, double>> cache_;
  mutable std::vector<char> filled_;
  std::vector<std::array<std::uint64_t, 2>> epochs_;
  SampleLedger ledger_;
};

/// Oracle for the quantum collection: index i names the Pauli word with
/// base-4 code i (or i+1 when the identity is excluded) and the biases are
/// Tr(rho P_i), Tr(sigma P_i). Biases are evaluated lazily — the collection
/// tester touches only a tiny fraction of the 4^n indices.
inline PairOracle make_quantum_oracle(const StateSpec& rho, const StateSpec& sigma,
                                      std::uint64_t master_seed, bool include_identity = true) {
  const unsigned n = num_qubits(rho);
  if (n != num_qubits(sigma)) {
    throw std::invalid_argument("make_quantum_oracle: qubit counts differ");
  }
  if (n > kMaxDenseQubits) {
    throw std::invalid_argument("make_quantum_oracle: qubit count exceeds the n <= 8 cap");
  }
  if (auto violation = validate(rho)) {
    throw std::invalid_argument("make_quantum_oracle: rho invalid: " + *violation);
  }
  if (auto violation = validate(sigma)) {
    throw std::invalid_argument("make_quantum_oracle: sigma invalid: " + *violation);
  }
  const std::uint64_t m = pauli_count(n) - (include_identity ? 0 : 1);
  auto rho_copy = std::make_shared<StateSpec>(rho);
  auto sigma_copy = std::make_shared<StateSpec>(sigma);
  const std::uint64_t offset = include_identity ? 0 : 1;
  return PairOracle(
      m,
      [rho_copy, sigma_copy, n, offset](std::uint64_t index) {
        const PauliString p(n, index + offset);
        return std::make_pair(expectation(*rho_copy, p), expectation(*sigma_copy, p));
      },
      master_seed);
}

/// Oracle over explicit bias arrays, for synthetic collection instances.
inline PairOracle make_synthetic_oracle(std::vector<double> alpha, std::vector<double> beta,
                                        std::uint64_t master_seed) {
  if (alpha.size() != beta.size() || alpha.empty()) {
    throw std::invalid_argument("make_synthetic_oracle: bias arrays must match and be nonempty");
  }
  const std::uint64_t m = alpha.size();
  auto a = std::make_shared<std::vector<double>>(std::move(alpha));
  auto b = std::make_shared<std::vector<double>>(std::move(beta));
  return PairOracle(
      m, [a, b](std::uint64_t index) { return std::make_pair((*a)[index], (*b)[index]); },
      master_seed);
}

}  // namespace qit
