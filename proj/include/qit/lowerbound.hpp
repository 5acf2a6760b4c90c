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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qit/pauli.hpp"
#include "qit/rng.hpp"
#include "qit/stats.hpp"

namespace qit {

// Mixedness-testing harness against the needle ensemble: how much
// measurement budget does it take to tell the maximally mixed state from a
// uniformly random (I + eps P) / 2^n? Each needle responds only at its own
// Pauli word (bias eps there, 0 everywhere else), so a strategy must spend
// about 1/eps^2 shots per candidate word and the required total budget
// scales with the ensemble size. This is an empirical demonstration of the
// threshold, not a proof.

enum class NeedleFamily { Full, XYZ };

inline const char* family_name(NeedleFamily family) {
  return family == NeedleFamily::Full ? "full" : "xyz";
}

/// The adversarial ensemble: all non-identity words (size 4^n - 1) or the
/// identity-free subfamily {X,Y,Z}^n (size 3^n).
struct NeedleEnsemble {
  unsigned n = 0;
  double eps = 0.0;
  NeedleFamily family = NeedleFamily::Full;

  std::uint64_t size() const {
    if (family == NeedleFamily::Full) {
      return pauli_count(n) - 1;
    }
    std::uint64_t s = 1;
    for (unsigned q = 0; q < n; ++q) {
      s *= 3;
    }
    return s;
  }

  /// Member t as a Pauli word. Full family: index t + 1. XYZ family: base-3
  /// digits of t, digit d mapping to letter d + 1 (X, Y or Z on every qubit).
  PauliString member(std::uint64_t t) const {
    if (t >= size()) {
      throw std::out_of_range("NeedleEnsemble: member out of range");
    }
    if (family == NeedleFamily::Full) {
      return PauliString(n, t + 1);
    }
    std::uint64_t index = 0;
    std::uint64_t rest = t;
    for (unsigned q = 0; q < n; ++q) {
      index |= (rest % 3 + 1) << (2 * q);
      rest /= 3;
    }
    return PauliString(n, index);
  }
};

enum class ShotStrategy { UniformSplit, AdaptiveGreedy };

inline const char* strategy_name(ShotStrategy s) {
  return s == ShotStrategy::UniformSplit ? "uniform-split" : "adaptive-greedy";
}

struct ShotPlanRow {
  std::uint64_t pauli_index = 0;
  std::uint64_t shots = 0;
};

/// Splits `budget` shots as evenly as possible over the first members of the
/// ensemble; with budget < members only the first `budget` get one shot.
/// Rows always carry at least one shot.
inline std::vector<ShotPlanRow> uniform_split_plan(const NeedleEnsemble& ensemble,
                                                   std::uint64_t budget) {
  if (budget == 0) {
    throw std::invalid_argument("uniform_split_plan: budget must be positive");
  }
  const std::uint64_t members = ensemble.size();
  const std::uint64_t covered = std::min(budget, members);
  const std::uint64_t base = budget / members;
  const std::uint64_t extra = budget % members;
  std::vector<ShotPlanRow> plan;
  plan.reserve(covered);
  for (std::uint64_t t = 0; t < covered; ++t) {
    const std::uint64_t shots = base + (t < extra ? 1 : 0);
    if (shots > 0) {
      plan.push_back({ensemble.member(t).index(), shots});
    }
  }
  return plan;
}

/// Bonferroni-corrected detection band: a needle is declared when any
/// measured word's empirical outcome frequency leaves
/// |hits/shots - 1/2| > sqrt(ln(2 * rows / delta) / (2 * shots)). Hoeffding
/// bounds each row's false-alarm rate under the mixed state by delta / rows,
/// so the family-wide false-alarm rate stays at most delta.
inline double detection_threshold(std::uint64_t measured_rows, double delta,
                                  std::uint64_t shots) {
  return std::sqrt(std::log(2.0 * static_cast<double>(measured_rows) / delta) /
                   (2.0 * static_cast<double>(shots)));
}

struct PlannedDecision {
  bool guess_needle = false;
  std::uint64_t samples_used = 0;
};

namespace detail {

inline std::uint64_t measure_pauli(std::uint64_t seed, std::uint64_t pauli_index,
                                   std::uint64_t epoch, std::uint64_t shots, double bias) {
  Xoshiro256 rng(derive_substream(seed, pauli_index, Side::P, epoch));
  return binomial_draw(rng, shots, 0.5 * (1.0 + bias));
}

}  // namespace detail

/// Executes a fixed plan against the true state: bias eps at the needle's
/// word (when the truth is a needle), 0 at every other measured word.
inline PlannedDecision run_planned_trial(std::span<const ShotPlanRow> plan,
                                         std::optional<std::uint64_t> needle_pauli_index,
                                         double eps, double detector_delta, std::uint64_t seed,
                                         std::uint64_t epoch = 0) {
  if (plan.empty()) {
    throw std::invalid_argument("run_planned_trial: plan is empty");
  }
  PlannedDecision decision;
  for (const auto& row : plan) {
    if (row.shots == 0) {
      throw std::invalid_argument("run_planned_trial: zero-shot rows are not allowed");
    }
    const double bias =
        needle_pauli_index && row.pauli_index == *needle_pauli_index ? eps : 0.0;
    const std::uint64_t hits = detail::measure_pauli(seed, row.pauli_index, epoch, row.shots, bias);
    decision.samples_used += row.shots;
    const double dev =
        std::abs(static_cast<double>(hits) / static_cast<double>(row.shots) - 0.5);
    if (dev > detection_threshold(plan.size(), detector_delta, row.shots)) {
      decision.guess_needle = true;
    }
  }
  return decision;
}

struct MixednessTrial {
  bool truth_needle = false;
  std::uint64_t true_member = 0;  // meaningful only when truth_needle
  bool guess_needle = false;
  std::uint64_t samples_used = 0;
};

namespace detail {

struct MemberStats {
  std::uint64_t shots = 0;
  std::uint64_t hits = 0;

  double deviation() const {
    return shots == 0 ? 0.0
                      : std::abs(static_cast<double>(hits) / static_cast<double>(shots) - 0.5);
  }
};

// Spends the budget in 4 rounds, each re-splitting over the quarter of the
// still-active members with the largest cumulative frequency deviation. The
// final call uses cumulative counts over every member that got shots. The
// needle's response is memoryless in the shot count, so adaptivity cannot
// beat uniform splitting here; this strategy exists to demonstrate that.
inline MixednessTrial run_adaptive_trial(const NeedleEnsemble& ensemble, std::uint64_t budget,
                                         double detector_delta, std::uint64_t seed,
                                         bool truth_needle, std::uint64_t true_member) {
  constexpr unsigned kRounds = 4;
  const std::uint64_t members = ensemble.size();
  const std::optional<std::uint64_t> needle_index =
      truth_needle ? std::optional<std::uint64_t>(ensemble.member(true_member).index())
                   : std::nullopt;

  std::vector<MemberStats> stats(members);
  std::vector<std::uint64_t> active(members);
  for (std::uint64_t t = 0; t < members; ++t) {
    active[t] = t;
  }

  MixednessTrial trial;
  trial.truth_needle = truth_needle;
  trial.true_member = true_member;

  std::uint64_t spent = 0;
  for (unsigned round = 0; round < kRounds && !active.empty(); ++round) {
    const std::uint64_t round_budget =
        round + 1 == kRounds ? budget - spent : budget / kRounds;
    if (round_budget == 0) {
      continue;
    }
    const std::uint64_t covered = std::min<std::uint64_t>(round_budget, active.size());
    const std::uint64_t base = round_budget / active.size();
    const std::uint64_t extra = round_budget % active.size();
    for (std::uint64_t pos = 0; pos < covered; ++pos) {
      const std::uint64_t shots = base + (pos < extra ? 1 : 0);
      if (shots == 0) {
        continue;
      }
      const std::uint64_t t = active[pos];
      const std::uint64_t pauli_index = ensemble.member(t).index();
      const double bias = needle_index && pauli_index == *needle_index ? ensemble.eps : 0.0;
      stats[t].hits += measure_pauli(seed, pauli_index, round, shots, bias);
      stats[t].shots += shots;
      spent += shots;
    }
    // Keep the most suspicious quarter for the next round.
    std::sort(active.begin(), active.end(), [&](std::uint64_t a, std::uint64_t b) {
      const double da = stats[a].deviation();
      const double db = stats[b].deviation();
      return da != db ? da > db : a < b;
    });
    const std::uint64_t keep = std::max<std::uint64_t>(1, (active.size() + 3) / 4);
    active.resize(keep);
  }

  std::uint64_t measured = 0;
  for (const auto& s : stats) {
    measured += s.shots > 0 ? 1 : 0;
  }
  for (std::uint64_t t = 0; t < members; ++t) {
    if (stats[t].shots == 0) {
      continue;
    }
    if (stats[t].deviation() > detection_threshold(measured, detector_delta, stats[t].shots)) {
      trial.guess_needle = true;
      break;
    }
  }
  trial.samples_used = spent;
  return trial;
}

}  // namespace detail

/// One trial with forced truth (test hook; run_mixedness_trial flips the
/// coin itself).
inline MixednessTrial simulate_mixedness_trial(const NeedleEnsemble& ensemble,
                                               ShotStrategy strategy, std::uint64_t budget,
                                               double detector_delta, bool truth_needle,
                                               std::uint64_t true_member, std::uint64_t seed) {
  if (ensemble.n < 1 || ensemble.n > kMaxQubits) {
    throw std::invalid_argument("mixedness trial: n must lie in [1, 14]");
  }
  if (!(ensemble.eps > 0.0) || ensemble.eps > 1.0) {
    throw std::invalid_argument("mixedness trial: eps must lie in (0, 1]");
  }
  if (strategy == ShotStrategy::AdaptiveGreedy) {
    return detail::run_adaptive_trial(ensemble, budget, detector_delta, seed, truth_needle,
                                      true_member);
  }
  const auto plan = uniform_split_plan(ensemble, budget);
  const std::optional<std::uint64_t> needle_index =
      truth_needle ? std::optional<std::uint64_t>(ensemble.member(true_member).index())
                   : std::nullopt;
  const PlannedDecision decision =
      run_planned_trial(plan, needle_index, ensemble.eps, detector_delta, seed);
  return MixednessTrial{truth_needle, true_member, decision.guess_needle, decision.samples_used};
}

/// One mixedness-testing trial: a fair coin picks the truth (mixed vs a
/// uniformly random ensemble member), the strategy spends the budget, and
/// the detection band produces the guess.
inline MixednessTrial run_mixedness_trial(const NeedleEnsemble& ensemble, ShotStrategy strategy,
                                          std::uint64_t budget, double detector_delta,
                                          std::uint64_t seed) {
  Xoshiro256 coin(derive_substream(seed, 0, kStreamTruthCoin, 0));
  const bool truth_needle = coin.next_unit() < 0.5;
  std::uint64_t true_member = 0;
  if (truth_needle) {
    Xoshiro256 pick(derive_substream(seed, 0, kStreamNeedlePick, 0));
    true_member = pick.next_below(ensemble.size());
  }
  return simulate_mixedness_trial(ensemble, strategy, budget, detector_delta, truth_needle,
                                  true_member, seed);
}

struct AdvantageCell {
  unsigned n = 0;
  double eps = 0.0;
  NeedleFamily family = NeedleFamily::Full;
  ShotStrategy strategy = ShotStrategy::UniformSplit;
  std::uint64_t budget = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double advantage = 0.0;  // 2 * success rate - 1
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultDetectorDelta = 0.1;

/// Monte Carlo sweep over budgets x strategies; each cell reports the
/// distinguishing advantage with a Wilson interval. Trials run on per-trial
/// substreams, so the table is reproducible for a fixed master seed at any
/// thread count.
inline std::vector<AdvantageCell> sweep_advantage(const NeedleEnsemble& ensemble,
                                                  std::span<const std::uint64_t> budgets,
                                                  std::span<const ShotStrategy> strategies,
                                                  std::uint64_t trials, std::uint64_t master_seed,
                                                  unsigned threads = 1,
                                                  double detector_delta = kDefaultDetectorDelta) {
  if (trials == 0) {
    throw std::invalid_argument("sweep_advantage: trials must be positive");
  }
  std::vector<AdvantageCell> cells;
  std::uint64_t cell_id = 0;
  for (const auto strategy : strategies) {
    for (const auto budget : budgets) {
      const std::uint64_t cell_master = derive_substream(master_seed, cell_id, kStreamTrialSplit, 0);
      const std::uint64_t successes =
          count_successes(trials, threads, [&](std::uint64_t t) {
            const auto trial =
                run_mixedness_trial(ensemble, strategy, budget, detector_delta,
                                    derive_substream(cell_master, t, kStreamTrialSplit, 1));
            return trial.guess_needle == trial.truth_needle;
          });
      const auto ci = wilson_interval(successes, trials);
      AdvantageCell cell;
      cell.n = ensemble.n;
      cell.eps = ensemble.eps;
      cell.family = ensemble.family;
      cell.strategy = strategy;
      cell.budget = budget;
      cell.trials = trials;
      cell.successes = successes;
      cell.advantage = 2.0 * static_cast<double>(successes) / static_cast<double>(trials) - 1.0;
      cell.ci_low = 2.0 * ci.low - 1.0;
      cell.ci_high = 2.0 * ci.high - 1.0;
      cell.seed = master_seed;
      cells.push_back(cell);
      ++cell_id;
    }
  }
  return cells;
}

inline void write_advantage_csv(std::ostream& out, std::span<const AdvantageCell> cells) {
  out << "n,eps,family,strategy,budget,trials,successes,advantage,ci_low,ci_high,seed\n";
  char buf[64];
  for (const auto& c : cells) {
    out << c.n << ',';
    std::snprintf(buf, sizeof buf, "%.17g", c.eps);
    out << buf << ',' << family_name(c.family) << ',' << strategy_name(c.strategy) << ','
        << c.budget << ',' << c.trials << ',' << c.successes << ',';
    std::snprintf(buf, sizeof buf, "%.17g", c.advantage);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", c.ci_low);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", c.ci_high);
    out << buf << ',' << c.seed << '\n';
  }
}

}  // namespace qit
