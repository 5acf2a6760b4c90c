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

#include "qit/binary_tester.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace qit;

namespace {

// Error-rate oracle: Monte Carlo over fresh oracles with per-trial seeds.
double measured_rate(double alpha, double beta, const BinaryTestParams& params,
                     std::uint64_t trials, bool count_rejections, std::uint64_t seed) {
  std::uint64_t events = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    PairOracle oracle(
        1, [alpha, beta](std::uint64_t) { return std::make_pair(alpha, beta); },
        derive_substream(seed, t, kStreamTrialSplit, 0));
    const bool equal = test_pair(oracle, 0, params).equal;
    events += count_rejections ? !equal : equal;
  }
  return static_cast<double>(events) / static_cast<double>(trials);
}

}  // namespace

TEST_CASE("required_samples evaluates the Hoeffding formula") {
  CHECK(required_samples(0.5, 1.0 / 3.0) == 80);  // ceil(8 ln 12 / 0.25)
  CHECK(required_samples(0.5, 0.5) == 67);        // ceil(8 ln 8 / 0.25)

  SECTION("halving the gap doubles the count up to rounding") {
    for (const double delta : {1.0 / 3.0, 0.1, 0.01}) {
      const double n1 = static_cast<double>(required_samples(0.5, delta));
      const double n2 = static_cast<double>(required_samples(0.25, delta));
      CHECK(n2 / n1 == Catch::Approx(2.0).margin(0.02));
    }
  }
  SECTION("squaring delta grows the count by at most 2x") {
    for (const double delta : {0.25, 0.1, 0.01}) {
      CHECK(required_samples(0.5, delta * delta) <= 2 * required_samples(0.5, delta));
      CHECK(required_samples(0.5, delta * delta) > required_samples(0.5, delta));
    }
  }
  SECTION("monotone in both arguments") {
    std::uint64_t prev = required_samples(0.02, 0.3);
    for (const double gap : {0.05, 0.1, 0.4, 1.0, 1.9}) {
      const std::uint64_t n = required_samples(gap, 0.3);
      CHECK(n <= prev);
      prev = n;
    }
    prev = required_samples(0.5, 0.5);
    for (const double delta : {0.3, 0.1, 0.01, 1e-6}) {
      const std::uint64_t n = required_samples(0.5, delta);
      CHECK(n >= prev);
      prev = n;
    }
  }
  SECTION("bad arguments") {
    CHECK_THROWS_AS(required_samples(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(required_samples(-1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(required_samples(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(required_samples(0.5, 0.6), std::invalid_argument);
  }
}

TEST_CASE("binary_test_params derives the threshold chain") {
  const auto params = binary_test_params(0.5, 1.0 / 3.0);
  CHECK(params.mean_gap == Catch::Approx(0.5));
  CHECK(params.threshold == Catch::Approx(0.25));
  CHECK(params.samples_per_side == 80);
}

TEST_CASE("deterministic distributions always come back equal") {
  const auto params = binary_test_params(0.5, 0.1);
  PairOracle oracle(1, [](std::uint64_t) { return std::make_pair(1.0, 1.0); }, 7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto outcome = test_pair(oracle, 0, params);
    REQUIRE(outcome.equal);
    REQUIRE(outcome.p_hat == 1.0);
    REQUIRE(outcome.q_hat == 1.0);
  }
  CHECK(oracle.ledger().total == 50 * 2 * params.samples_per_side);
}

TEST_CASE("empirical error rates sit under delta") {
  // Null cases: alpha = beta. Far case: ||p - q||_2^2 = 2 * gap_sq, i.e.
  // alpha - beta = 2 sqrt(gap_sq).
  const double gap_sq = 0.5;
  const double far_bias = std::sqrt(gap_sq);  // alpha = +sqrt(gap), beta = -sqrt(gap)
  const std::uint64_t trials = 1000;
  for (const double delta : {1.0 / 3.0, 0.1, 0.01}) {
    const auto params = binary_test_params(gap_sq, delta);
    const double sigma = std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
    for (const double bias : {0.0, 0.4, -0.4}) {
      const double false_no = measured_rate(bias, bias, params, trials, true, 0xabc0 + trials);
      INFO("delta " << delta << " bias " << bias);
      CHECK(false_no <= delta + 3.0 * sigma);
    }
    const double false_yes =
        measured_rate(far_bias, -far_bias, params, trials, false, 0xdef0 + trials);
    INFO("delta " << delta);
    CHECK(false_yes <= delta + 3.0 * sigma);
  }
}

TEST_CASE("far pairs at the extreme are rejected") {
  // alpha = 1, beta = -1: ||p - q||_2^2 = 2, far for any gap below 2.
  const auto params = binary_test_params(0.5, 0.1);
  const double reject_rate = measured_rate(1.0, -1.0, params, 400, true, 0xfeed);
  CHECK(reject_rate == 1.0);
}
