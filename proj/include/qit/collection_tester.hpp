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

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "qit/binary_tester.hpp"
#include "qit/sampling.hpp"

namespace qit {

// Identity tester for a collection of m binary distribution pairs in the
// query model: answer "Yes" when p_i = q_i for every index, "No" when the
// average squared Euclidean distance (1/m) sum_i ||p_i - q_i||_2^2 exceeds
// eps^2. Both answers are correct with probability at least 2/3 at the
// default L.
//
// The tester works in rows k = 0 .. ceil(log2 m). Row k samples
// 2^k (k^2+1) L indices with replacement and runs the binary tester on each
// at squared gap 2^{k-1} eps^2 with failure budget L^-2 6^-k. A single "No"
// from any binary test rejects the collection.

inline constexpr std::uint64_t kDefaultL = 100;
inline constexpr double kDeltaFloor = 1e-12;

struct ScheduleRow {
  unsigned k = 0;
  std::uint64_t num_indices = 0;       // 2^k * weight(k) * L tests in this row
  double gap_sq = 0.0;                 // 2^{k-1} eps^2
  double delta = 0.0;                  // L^-2 6^-k, floored at kDeltaFloor
  std::uint64_t samples_per_side = 0;  // per-test N for (gap_sq, delta)
  bool vacuous = false;                // gap_sq >= 2: no binary pair is that far apart
};

struct Schedule {
  std::uint64_t m = 0;
  double eps = 0.0;
  std::uint64_t L = kDefaultL;
  std::optional<double> mu;
  std::vector<ScheduleRow> rows;

  /// Deterministic worst-case draw count: every non-vacuous test consumes
  /// 2 * samples_per_side draws and vacuous rows consume none.
  std::uint64_t total_draws() const {
    std::uint64_t total = 0;
    for (const auto& row : rows) {
      if (!row.vacuous) {
        total += row.num_indices * 2 * row.samples_per_side;
      }
    }
    return total;
  }
};

/// Row weight: k^2 + 1 by default; with the exponent knob mu set, the
/// lighter ceil(k^{1+mu}) + 1, trading a log factor of the total budget for
/// a larger constant.
inline std::uint64_t schedule_weight(unsigned k, std::optional<double> mu) {
  if (mu) {
    return static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(k), 1.0 + *mu))) + 1;
  }
  return static_cast<std::uint64_t>(k) * k + 1;
}

inline Schedule build_schedule(std::uint64_t m, double eps, std::uint64_t L = kDefaultL,
                               std::optional<double> mu = std::nullopt) {
  if (m < 1) {
    throw std::invalid_argument("build_schedule: m must be at least 1");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("build_schedule: eps must be positive");
  }
  if (L < 1) {
    throw std::invalid_argument("build_schedule: L must be at least 1");
  }
  const unsigned k_max = m == 1 ? 0 : static_cast<unsigned>(std::bit_width(m - 1));
  Schedule schedule{m, eps, L, mu, {}};
  schedule.rows.reserve(k_max + 1);
  for (unsigned k = 0; k <= k_max; ++k) {
    ScheduleRow row;
    row.k = k;
    row.num_indices = (std::uint64_t{1} << k) * schedule_weight(k, mu) * L;
    row.gap_sq = std::pow(2.0, static_cast<int>(k) - 1) * eps * eps;
    // L^-2 6^-k, kept inside the binary tester's (0, 1/2] budget domain
    // (the upper clamp only matters at L = 1).
    row.delta = std::clamp(std::pow(static_cast<double>(L), -2.0) *
                               std::pow(6.0, -static_cast<double>(k)),
                           kDeltaFloor, 0.5);
    row.samples_per_side = required_samples(row.gap_sq, row.delta);
    row.vacuous = row.gap_sq >= 2.0;
    schedule.rows.push_back(row);
  }
  return schedule;
}

struct CollectionOptions {
  std::uint64_t L = kDefaultL;
  std::optional<double> mu;
  // With early exit off the whole schedule runs and the verdict reports the
  // first (k, position) "No", which must match the early-exit run.
  bool early_exit = true;
};

struct TriggeringTest {
  unsigned k = 0;
  std::uint64_t position = 0;  // draw position within row k
  std::uint64_t index = 0;     // collection index that failed
};

struct CollectionVerdict {
  bool accept = true;
  std::optional<TriggeringTest> trigger;
  std::vector<std::uint64_t> per_row_draws;  // entry per schedule row, vacuous rows 0
  std::uint64_t total_draws = 0;
  SampleLedger ledger;
  double wall_ms = 0.0;
};

/// Runs the collection identity test against the oracle with its own master
/// seed. Index selection for row k uses the substream
/// (master, k, kStreamIndexSelect, 0), so a rerun with early exit disabled
/// replays the same tests in the same order.
inline CollectionVerdict test_collection(PairOracle& oracle, double eps,
                                         const CollectionOptions& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Schedule schedule = build_schedule(oracle.size(), eps, opts.L, opts.mu);

  CollectionVerdict verdict;
  verdict.per_row_draws.assign(schedule.rows.size(), 0);
  bool stop = false;
  for (const auto& row : schedule.rows) {
    if (stop) {
      break;
    }
    if (row.vacuous) {
      continue;  // ||p - q||_2^2 <= 2 always; the far case is empty at this row
    }
    const BinaryTestParams params = binary_test_params(row.gap_sq, row.delta);
    Xoshiro256 pick(derive_substream(oracle.master_seed(), row.k, kStreamIndexSelect, 0));
    for (std::uint64_t pos = 0; pos < row.num_indices; ++pos) {
      const std::uint64_t index = pick.next_below(schedule.m);
      const BinaryOutcome outcome = test_pair(oracle, index, params);
      verdict.per_row_draws[row.k] += outcome.samples_used;
      if (!outcome.equal) {
        if (!verdict.trigger) {
          verdict.trigger = TriggeringTest{row.k, pos, index};
        }
        if (opts.early_exit) {
          stop = true;
          break;
        }
      }
    }
  }
  verdict.accept = !verdict.trigger.has_value();
  for (const auto draws : verdict.per_row_draws) {
    verdict.total_draws += draws;
  }
  verdict.ledger = oracle.ledger();
  verdict.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return verdict;
}

/// Soundness diagnostic over exact biases: the smallest k with
///   |{i : ||p_i - q_i||_2^2 >= 2^{k-1} eps^2}| > m / (2^k * 100 * (k^2+1)),
/// found by direct enumeration. Whenever the average squared distance
/// exceeds eps^2 such a k <= ceil(log2 m) exists, and row k of the schedule
/// then hits a far index with probability 1 - exp(-Omega(L)).
inline std::optional<unsigned> find_soundness_level(std::span<const double> alpha,
                                                    std::span<const double> beta, double eps) {
  if (alpha.size() != beta.size() || alpha.empty()) {
    throw std::invalid_argument("find_soundness_level: bias arrays must match and be nonempty");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("find_soundness_level: eps must be positive");
  }
  const std::uint64_t m = alpha.size();
  const unsigned k_max = m == 1 ? 0 : static_cast<unsigned>(std::bit_width(m - 1));
  for (unsigned k = 0; k <= k_max; ++k) {
    const double gap = std::pow(2.0, static_cast<int>(k) - 1) * eps * eps;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const double diff = alpha[i] - beta[i];
      if (diff * diff / 2.0 >= gap) {
        ++count;
      }
    }
    const double threshold = static_cast<double>(m) /
                             (std::pow(2.0, static_cast<double>(k)) * 100.0 *
                              (static_cast<double>(k) * k + 1.0));
    if (static_cast<double>(count) > threshold) {
      return k;
    }
  }
  return std::nullopt;
}

/// Per-row table as CSV: k, num_indices, gap_sq, delta, N, vacuous.
inline void write_schedule_csv(std::ostream& out, const Schedule& schedule) {
  out << "k,num_indices,gap_sq,delta,N,vacuous\n";
  char buf[64];
  for (const auto& row : schedule.rows) {
    out << row.k << ',' << row.num_indices << ',';
    std::snprintf(buf, sizeof buf, "%.17g", row.gap_sq);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", row.delta);
    out << buf << ',' << row.samples_per_side << ',' << (row.vacuous ? 1 : 0) << '\n';
  }
}

}  // namespace qit
