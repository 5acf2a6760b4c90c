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

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "qit/sampling.hpp"

namespace qit {

// Equality test for one pair of unknown binary distributions.
//
// For binary distributions p = (p0, 1-p0) and q = (q0, 1-q0),
// ||p - q||_2^2 = 2 (p0 - q0)^2, so the far promise ||p - q||_2^2 > gap_sq
// is the same as |p0 - q0| > Delta with Delta = sqrt(gap_sq / 2). The tester
// draws N samples per side and answers "equal" iff |p0_hat - q0_hat| <= tau
// with tau = Delta / 2.
//
// Constants: each empirical frequency is a mean of N [0,1] samples, so by
// Hoeffding P(|p0_hat - p0| > t) <= 2 exp(-2 N t^2) and splitting t across
// the two sides gives
//   P(|(p0_hat - q0_hat) - (p0 - q0)| > t) <= 4 exp(-N t^2 / 2).
// Under p = q a "No" needs a deviation above tau; under |p0 - q0| > Delta a
// "Yes" needs a deviation above Delta - tau = tau. Both failure modes are
// therefore bounded by 4 exp(-N tau^2 / 2) = 4 exp(-N Delta^2 / 8), and
//   N = ceil(8 ln(4/delta) / Delta^2)
// pushes both below delta. N scales as Theta(log(1/delta) / gap_sq).
struct BinaryTestParams {
  double gap_sq = 0.0;                 // far promise: ||p - q||_2^2 > gap_sq
  double delta = 0.0;                  // failure probability budget per contract side
  double mean_gap = 0.0;               // Delta = sqrt(gap_sq / 2)
  double threshold = 0.0;              // tau = Delta / 2; verdict "No" iff |p_hat - q_hat| > tau
  std::uint64_t samples_per_side = 0;  // N
};

/// Per-side sample count N = ceil(8 ln(4/delta) / Delta^2).
inline std::uint64_t required_samples(double gap_sq, double delta) {
  if (!(gap_sq > 0.0)) {
    throw std::invalid_argument("required_samples: gap_sq must be positive");
  }
  if (!(delta > 0.0) || delta > 0.5) {
    throw std::invalid_argument("required_samples: delta must lie in (0, 1/2]");
  }
  const double mean_gap_sq = gap_sq / 2.0;
  return static_cast<std::uint64_t>(std::ceil(8.0 * std::log(4.0 / delta) / mean_gap_sq));
}

inline BinaryTestParams binary_test_params(double gap_sq, double delta) {
  BinaryTestParams params;
  params.gap_sq = gap_sq;
  params.delta = delta;
  params.samples_per_side = required_samples(gap_sq, delta);
  params.mean_gap = std::sqrt(gap_sq / 2.0);
  params.threshold = params.mean_gap / 2.0;
  return params;
}

struct BinaryOutcome {
  bool equal = false;  // "Yes" verdict
  double p_hat = 0.0;
  double q_hat = 0.0;
  std::uint64_t samples_used = 0;  // both sides combined
};

/// Runs the test against pair `index` of the oracle. Contract: if p = q then
/// P(No) <= delta; if ||p - q||_2^2 > gap_sq then P(Yes) <= delta. In the
/// gap region between 0 and gap_sq either verdict may come back. Ties sit on
/// the "Yes" side (strict > rejects), keeping the null guarantee clean.
inline BinaryOutcome test_pair(PairOracle& oracle, std::uint64_t index,
                               const BinaryTestParams& params) {
  const std::uint64_t n = params.samples_per_side;
  const std::uint64_t hits_p = oracle.draw(Side::P, index, n);
  const std::uint64_t hits_q = oracle.draw(Side::Q, index, n);
  BinaryOutcome out;
  out.p_hat = static_cast<double>(hits_p) / static_cast<double>(n);
  out.q_hat = static_cast<double>(hits_q) / static_cast<double>(n);
  out.equal = !(std::abs(out.p_hat - out.q_hat) > params.threshold);
  out.samples_used = 2 * n;
  return out;
}

}  // namespace qit
