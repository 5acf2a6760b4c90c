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

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qit/collection_tester.hpp"
#include "qit/identity_test.hpp"
#include "qit/lowerbound.hpp"
#include "qit/stats.hpp"
#include "qit/states.hpp"

namespace qit::cli {

// Exit codes: 0 verdict-Yes / success, 1 verdict-No, 2 usage error,
// 3 runtime error.
inline constexpr int kExitYes = 0;
inline constexpr int kExitNo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// State mini-language:
///   mixed                        maximally mixed (requires a qubit count)
///   product:x,y,z[;x,y,z...]     one Bloch triple per qubit (qubit 0 first)
///   needle:LETTERS:eps           (I + eps P)/2^n with P given as letters
///   dense:PATH                   JSON file {"n":..,"re":[[..]],"im":[[..]]}
inline StateSpec parse_state_spec(const std::string& text, std::optional<unsigned> n_hint) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "mixed") {
    if (!rest.empty()) {
      throw std::invalid_argument("state 'mixed' takes no parameters");
    }
    if (!n_hint) {
      throw std::invalid_argument("state 'mixed' requires --n");
    }
    return maximally_mixed(*n_hint);
  }
  if (kind == "product") {
    std::vector<std::array<double, 3>> blochs;
    std::stringstream qubits(rest);
    std::string triple;
    while (std::getline(qubits, triple, ';')) {
      std::stringstream comps(triple);
      std::string comp;
      std::array<double, 3> b{};
      int filled = 0;
      while (std::getline(comps, comp, ',')) {
        if (filled >= 3) {
          throw std::invalid_argument("product state: more than 3 components in '" + triple + "'");
        }
        b[filled++] = std::stod(comp);
      }
      if (filled != 3) {
        throw std::invalid_argument("product state: expected x,y,z in '" + triple + "'");
      }
      blochs.push_back(b);
    }
    if (blochs.empty()) {
      throw std::invalid_argument("product state: no Bloch triples given");
    }
    return ProductState{std::move(blochs)};
  }
  if (kind == "needle") {
    const auto second = rest.find(':');
    if (second == std::string::npos) {
      throw std::invalid_argument("needle state: expected needle:LETTERS:eps");
    }
    const std::string letters = rest.substr(0, second);
    const double eps = std::stod(rest.substr(second + 1));
    return NeedleState{PauliString::from_letters(letters), eps};
  }
  if (kind == "dense") {
    if (rest.empty()) {
      throw std::invalid_argument("dense state: expected dense:PATH");
    }
    return load_dense_state(rest);
  }
  throw std::invalid_argument("unknown state kind '" + kind +
                              "' (expected mixed, product, needle or dense)");
}

namespace detail {

inline std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

inline void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  out << payload;
}

inline std::vector<std::uint64_t> parse_uint_list(const std::string& text) {
  std::vector<std::uint64_t> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    values.push_back(std::stoull(item));
  }
  if (values.empty()) {
    throw std::invalid_argument("expected a comma-separated list of integers");
  }
  return values;
}

struct SeedOption {
  std::optional<std::uint64_t> value;

  std::uint64_t resolve() const { return value ? *value : entropy_seed(); }
};

}  // namespace detail

struct CommonArgs {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0 = auto
  std::string out;
  std::string format = "csv";
};

inline void add_seed_option(CLI::App* cmd, std::optional<std::uint64_t>& seed) {
  cmd->add_option("--seed", seed,
                  "master seed (64-bit); omitted = OS entropy, recorded in the output");
}

// ---------------------------------------------------------------------------
// identity

inline int run_identity(const std::string& rho_text, const std::string& sigma_text,
                        std::optional<unsigned> n_flag, double eps, std::uint64_t L,
                        std::optional<double> mu, bool exclude_identity, bool no_early_exit,
                        std::uint64_t trials, const CommonArgs& common, bool include_timing,
                        const std::string& emit_schedule) {
  StateSpec rho = parse_state_spec(rho_text, n_flag);
  StateSpec sigma = parse_state_spec(sigma_text, n_flag);
  const unsigned n = num_qubits(rho);
  if (n != num_qubits(sigma)) {
    throw std::invalid_argument("rho and sigma have different qubit counts");
  }
  if (n_flag && *n_flag != n) {
    throw std::invalid_argument("--n does not match the state specs");
  }
  if (auto violation = validate(rho)) {
    throw std::invalid_argument("rho invalid: " + *violation);
  }
  if (auto violation = validate(sigma)) {
    throw std::invalid_argument("sigma invalid: " + *violation);
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("--eps must be positive");
  }
  if (L < 1 || trials < 1) {
    throw std::invalid_argument("--L and --trials must be at least 1");
  }

  const std::uint64_t master = common.seed ? *common.seed : detail::entropy_seed();
  QitOptions opts;
  opts.L = L;
  opts.mu = mu;
  opts.include_identity = !exclude_identity;
  opts.early_exit = !no_early_exit;

  if (!emit_schedule.empty()) {
    const std::uint64_t m = pauli_count(n) - (opts.include_identity ? 0 : 1);
    std::ofstream sched_out(emit_schedule);
    if (!sched_out) {
      throw std::runtime_error("cannot open schedule file: " + emit_schedule);
    }
    write_schedule_csv(sched_out, build_schedule(m, collection_eps(n, eps), L, mu));
  }

  std::vector<TrialReport> reports(trials);
  const unsigned threads = resolve_threads(common.threads);
  count_successes(trials, threads, [&](std::uint64_t t) {
    QitInstance instance{rho, sigma, eps,
                         trials == 1 ? master : derive_substream(master, t, kStreamTrialSplit, 0),
                         opts};
    reports[t] = test_identity(instance);
    return reports[t].accept;
  });

  std::uint64_t accepts = 0;
  nlohmann::json report_array = nlohmann::json::array();
  for (const auto& r : reports) {
    accepts += r.accept ? 1 : 0;
    report_array.push_back(r.to_json(include_timing));
  }

  nlohmann::json out;
  out["config"] = {{"subcommand", "identity"},
                   {"n", n},
                   {"eps", eps},
                   {"rho", rho_text},
                   {"sigma", sigma_text},
                   {"L", L},
                   {"mu", mu ? nlohmann::json(*mu) : nlohmann::json(nullptr)},
                   {"seed", master},
                   {"trials", trials},
                   {"threads", threads},
                   {"exclude_identity", exclude_identity},
                   {"early_exit", opts.early_exit}};
  out["reports"] = std::move(report_array);
  out["summary"] = {{"accepts", accepts},
                    {"rejects", trials - accepts},
                    {"accept_rate", static_cast<double>(accepts) / static_cast<double>(trials)},
                    {"predicted_budget", predicted_budget(n, eps, L, mu, opts.include_identity)}};
  detail::write_output(common.out, out.dump(2) + "\n");
  return 2 * accepts >= trials ? kExitYes : kExitNo;
}

// ---------------------------------------------------------------------------
// collection

inline int run_collection(const std::string& spec_path, double eps, std::uint64_t L,
                          std::optional<double> mu, bool no_early_exit, std::uint64_t trials,
                          const CommonArgs& common) {
  std::ifstream in(spec_path);
  if (!in) {
    throw std::invalid_argument("cannot open collection spec: " + spec_path);
  }
  nlohmann::json spec;
  in >> spec;
  if (!spec.contains("alpha") || !spec.contains("beta")) {
    throw std::invalid_argument("collection spec must contain 'alpha' and 'beta' arrays");
  }
  std::vector<double> alpha = spec.at("alpha").get<std::vector<double>>();
  std::vector<double> beta = spec.at("beta").get<std::vector<double>>();
  if (alpha.size() != beta.size() || alpha.empty()) {
    throw std::invalid_argument("collection spec arrays must be nonempty and equal length");
  }
  for (const double b : alpha) {
    if (std::abs(b) > 1.0) throw std::invalid_argument("alpha entries must lie in [-1, 1]");
  }
  for (const double b : beta) {
    if (std::abs(b) > 1.0) throw std::invalid_argument("beta entries must lie in [-1, 1]");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("--eps must be positive");
  }
  if (L < 1 || trials < 1) {
    throw std::invalid_argument("--L and --trials must be at least 1");
  }

  const std::uint64_t master = common.seed ? *common.seed : detail::entropy_seed();
  CollectionOptions opts;
  opts.L = L;
  opts.mu = mu;
  opts.early_exit = !no_early_exit;

  const unsigned threads = resolve_threads(common.threads);
  std::vector<nlohmann::json> trial_reports(trials);
  std::vector<char> accepted(trials, 0);
  count_successes(trials, threads, [&](std::uint64_t t) {
    const std::uint64_t seed =
        trials == 1 ? master : derive_substream(master, t, kStreamTrialSplit, 0);
    PairOracle oracle = make_synthetic_oracle(alpha, beta, seed);
    const CollectionVerdict verdict = test_collection(oracle, eps, opts);
    nlohmann::json j;
    j["verdict"] = verdict.accept ? "Yes" : "No";
    j["seed"] = seed;
    j["total_samples"] = verdict.total_draws;
    j["per_k_samples"] = verdict.per_row_draws;
    if (verdict.trigger) {
      j["triggering_index"] = verdict.trigger->index;
      j["triggering_k"] = verdict.trigger->k;
    }
    trial_reports[t] = std::move(j);
    accepted[t] = verdict.accept ? 1 : 0;
    return verdict.accept;
  });

  std::uint64_t accepts = 0;
  for (const char a : accepted) {
    accepts += a;
  }
  nlohmann::json out;
  out["config"] = {{"subcommand", "collection"}, {"spec", spec_path},
                   {"m", alpha.size()},          {"eps", eps},
                   {"L", L},                     {"mu", mu ? nlohmann::json(*mu) : nlohmann::json(nullptr)},
                   {"seed", master},             {"trials", trials},
                   {"threads", threads},         {"early_exit", opts.early_exit}};
  out["reports"] = trial_reports;
  out["summary"] = {{"accepts", accepts},
                    {"rejects", trials - accepts},
                    {"accept_rate", static_cast<double>(accepts) / static_cast<double>(trials)}};
  detail::write_output(common.out, out.dump(2) + "\n");
  return 2 * accepts >= trials ? kExitYes : kExitNo;
}

// ---------------------------------------------------------------------------
// mixedness

inline int run_mixedness(unsigned n, double eps, const std::string& family_text,
                         const std::string& strategies_text, const std::string& budgets_text,
                         std::uint64_t trials, double detector_delta, const CommonArgs& common) {
  NeedleFamily family;
  if (family_text == "full") {
    family = NeedleFamily::Full;
  } else if (family_text == "xyz") {
    family = NeedleFamily::XYZ;
  } else {
    throw std::invalid_argument("--family must be 'full' or 'xyz'");
  }
  std::vector<ShotStrategy> strategies;
  {
    std::stringstream stream(strategies_text);
    std::string item;
    while (std::getline(stream, item, ',')) {
      if (item == "uniform-split") {
        strategies.push_back(ShotStrategy::UniformSplit);
      } else if (item == "adaptive-greedy") {
        strategies.push_back(ShotStrategy::AdaptiveGreedy);
      } else {
        throw std::invalid_argument("unknown strategy '" + item + "'");
      }
    }
  }
  if (strategies.empty()) {
    throw std::invalid_argument("--strategies must name at least one strategy");
  }
  const std::vector<std::uint64_t> budgets = detail::parse_uint_list(budgets_text);
  if (trials < 100) {
    throw std::invalid_argument("--trials must be at least 100 for a sweep");
  }
  if (!(detector_delta > 0.0) || detector_delta >= 1.0) {
    throw std::invalid_argument("--delta-d must lie in (0, 1)");
  }

  const std::uint64_t master = common.seed ? *common.seed : detail::entropy_seed();
  const NeedleEnsemble ensemble{n, eps, family};
  const auto cells = sweep_advantage(ensemble, budgets, strategies, trials, master,
                                     resolve_threads(common.threads), detector_delta);

  if (common.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : cells) {
      rows.push_back({{"n", c.n},
                      {"eps", c.eps},
                      {"family", family_name(c.family)},
                      {"strategy", strategy_name(c.strategy)},
                      {"budget", c.budget},
                      {"trials", c.trials},
                      {"successes", c.successes},
                      {"advantage", c.advantage},
                      {"ci_low", c.ci_low},
                      {"ci_high", c.ci_high},
                      {"seed", c.seed}});
    }
    detail::write_output(common.out, nlohmann::json{{"cells", rows}}.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    write_advantage_csv(csv, cells);
    detail::write_output(common.out, csv.str());
  }
  return kExitYes;
}

// ---------------------------------------------------------------------------
// schedule

inline int run_schedule(std::optional<std::uint64_t> m_flag, std::optional<unsigned> n_flag,
                        double eps, std::uint64_t L, std::optional<double> mu,
                        bool exclude_identity, const CommonArgs& common) {
  if (m_flag.has_value() == n_flag.has_value()) {
    throw std::invalid_argument("give exactly one of --m (collection) or --n (quantum instance)");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("--eps must be positive");
  }
  std::uint64_t m = 0;
  double collection_level_eps = eps;
  if (n_flag) {
    if (*n_flag < 1 || *n_flag > kMaxQubits) {
      throw std::invalid_argument("--n must lie in [1, 14]");
    }
    m = pauli_count(*n_flag) - (exclude_identity ? 1 : 0);
    collection_level_eps = collection_eps(*n_flag, eps);
  } else {
    m = *m_flag;
  }
  const Schedule schedule = build_schedule(m, collection_level_eps, L, mu);

  if (common.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : schedule.rows) {
      rows.push_back({{"k", row.k},
                      {"num_indices", row.num_indices},
                      {"gap_sq", row.gap_sq},
                      {"delta", row.delta},
                      {"N", row.samples_per_side},
                      {"vacuous", row.vacuous}});
    }
    nlohmann::json out{{"m", schedule.m},
                       {"eps", schedule.eps},
                       {"L", schedule.L},
                       {"mu", mu ? nlohmann::json(*mu) : nlohmann::json(nullptr)},
                       {"rows", rows},
                       {"total_draws", schedule.total_draws()}};
    detail::write_output(common.out, out.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    write_schedule_csv(csv, schedule);
    detail::write_output(common.out, csv.str());
  }
  return kExitYes;
}

// ---------------------------------------------------------------------------
// calibrate

inline int run_calibrate(std::uint64_t m, double eps, std::uint64_t trials,
                         const std::string& ls_text, const CommonArgs& common) {
  const std::vector<std::uint64_t> l_values = detail::parse_uint_list(ls_text);
  if (m < 1 || !(eps > 0.0) || trials < 1) {
    throw std::invalid_argument("calibrate: m, eps and trials must be positive");
  }
  const double needle_gap = std::min(2.0, std::sqrt(2.0 * static_cast<double>(m)) * eps);
  const std::uint64_t master = common.seed ? *common.seed : detail::entropy_seed();
  const unsigned threads = resolve_threads(common.threads);

  nlohmann::json rows = nlohmann::json::array();
  std::optional<std::uint64_t> smallest_passing;
  for (std::size_t li = 0; li < l_values.size(); ++li) {
    const std::uint64_t L = l_values[li];
    CollectionOptions opts;
    opts.L = L;

    // Completeness: identical random collections.
    const std::uint64_t accept_master = derive_substream(master, li, kStreamTrialSplit, 0);
    const std::uint64_t accepts = count_successes(trials, threads, [&](std::uint64_t t) {
      const std::uint64_t seed = derive_substream(accept_master, t, kStreamTrialSplit, 0);
      Xoshiro256 gen(derive_substream(seed, 0, kStreamInstanceGen, 0));
      std::vector<double> biases(m);
      for (auto& b : biases) {
        b = 2.0 * gen.next_unit() - 1.0;
      }
      PairOracle oracle = make_synthetic_oracle(biases, biases, seed);
      return test_collection(oracle, eps, opts).accept;
    });

    // Soundness: all the l2 mass on one random index.
    const std::uint64_t reject_master = derive_substream(master, li, kStreamTrialSplit, 1);
    const std::uint64_t rejects = count_successes(trials, threads, [&](std::uint64_t t) {
      const std::uint64_t seed = derive_substream(reject_master, t, kStreamTrialSplit, 0);
      Xoshiro256 gen(derive_substream(seed, 0, kStreamInstanceGen, 0));
      std::vector<double> alpha(m, 0.0);
      std::vector<double> beta(m, 0.0);
      const std::uint64_t far = gen.next_below(m);
      alpha[far] = needle_gap / 2.0;
      beta[far] = -needle_gap / 2.0;
      PairOracle oracle = make_synthetic_oracle(alpha, beta, seed);
      return !test_collection(oracle, eps, opts).accept;
    });

    const double accept_rate = static_cast<double>(accepts) / static_cast<double>(trials);
    const double reject_rate = static_cast<double>(rejects) / static_cast<double>(trials);
    const auto accept_ci = wilson_interval(accepts, trials);
    const auto reject_ci = wilson_interval(rejects, trials);
    if (!smallest_passing && accept_rate >= 2.0 / 3.0 && reject_rate >= 2.0 / 3.0) {
      smallest_passing = L;
    }
    rows.push_back({{"L", L},
                    {"accept_rate", accept_rate},
                    {"accept_ci", {accept_ci.low, accept_ci.high}},
                    {"reject_rate", reject_rate},
                    {"reject_ci", {reject_ci.low, reject_ci.high}}});
  }

  nlohmann::json out{{"config",
                      {{"subcommand", "calibrate"},
                       {"m", m},
                       {"eps", eps},
                       {"trials", trials},
                       {"seed", master},
                       {"threads", threads},
                       {"needle_bias_gap", needle_gap}}},
                     {"rows", rows},
                     {"smallest_passing_L",
                      smallest_passing ? nlohmann::json(*smallest_passing) : nlohmann::json(nullptr)}};
  detail::write_output(common.out, out.dump(2) + "\n");
  return kExitYes;
}

// ---------------------------------------------------------------------------
// selftest

inline int run_selftest(std::ostream& out) {
  std::uint64_t failures = 0;
  const auto check = [&](bool ok, const std::string& what) {
    out << (ok ? "ok - " : "FAIL - ") << what << "\n";
    failures += ok ? 0 : 1;
  };

  // Coefficient (Parseval) route agrees with the dense route.
  {
    Xoshiro256 gen(0x5e1f7e57);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const unsigned n = 1 + static_cast<unsigned>(gen.next_below(3));
      ProductState a, b;
      for (unsigned q = 0; q < n; ++q) {
        const auto bloch = [&] {
          std::array<double, 3> v{};
          double norm_sq = 0.0;
          for (auto& c : v) {
            c = 2.0 * gen.next_unit() - 1.0;
            norm_sq += c * c;
          }
          const double scale = gen.next_unit() / std::max(1.0, std::sqrt(norm_sq));
          for (auto& c : v) {
            c *= scale;
          }
          return v;
        };
        a.blochs.push_back(bloch());
        b.blochs.push_back(bloch());
      }
      const double dense = hs_distance_sq(a, b, HsPath::Dense);
      const double parseval = hs_distance_sq(a, b, HsPath::Parseval);
      worst = std::max(worst, std::abs(dense - parseval));
    }
    check(worst <= 1e-10, "hs_distance_sq dense/parseval agreement (worst " +
                              std::to_string(worst) + ")");
  }

  // Needle states sit at trace distance exactly eps from maximally mixed.
  {
    double worst = 0.0;
    for (unsigned n = 1; n <= 3; ++n) {
      for (const double eps : {0.25, 1.0}) {
        const NeedleState needle{PauliString(n, pauli_count(n) - 1), eps};
        const double dist = trace_distance(StateSpec{needle}, StateSpec{maximally_mixed(n)});
        worst = std::max(worst, std::abs(dist - eps));
      }
    }
    check(worst <= 1e-10, "needle trace distance equals eps (worst dev " +
                              std::to_string(worst) + ")");
  }

  // ||p - q||_2^2 = (alpha - beta)^2 / 2 exactly.
  {
    Xoshiro256 gen(0xb1a5);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const double a = 2.0 * gen.next_unit() - 1.0;
      const double b = 2.0 * gen.next_unit() - 1.0;
      const double p0 = 0.5 * (1 + a), q0 = 0.5 * (1 + b);
      const double l2 = (p0 - q0) * (p0 - q0) + ((1 - p0) - (1 - q0)) * ((1 - p0) - (1 - q0));
      worst = std::max(worst, std::abs(l2 - (a - b) * (a - b) / 2.0));
    }
    check(worst <= 1e-15, "binary l2 identity (worst dev " + std::to_string(worst) + ")");
  }

  // Norm chain 2^n ||rho - sigma||_2^2 >= ||rho - sigma||_1^2.
  {
    Xoshiro256 gen(0xc4a1);
    bool ok = true;
    for (int rep = 0; rep < 10; ++rep) {
      const unsigned n = 1 + static_cast<unsigned>(gen.next_below(3));
      ProductState a, b;
      for (unsigned q = 0; q < n; ++q) {
        std::array<double, 3> va{}, vb{};
        for (int c = 0; c < 3; ++c) {
          va[c] = (2.0 * gen.next_unit() - 1.0) / 2.0;
          vb[c] = (2.0 * gen.next_unit() - 1.0) / 2.0;
        }
        a.blochs.push_back(va);
        b.blochs.push_back(vb);
      }
      const double hs = hs_distance_sq(a, b, HsPath::Dense);
      const double td = trace_distance(StateSpec{a}, StateSpec{b});
      ok = ok && (std::pow(2.0, n) * hs >= td * td - 1e-9);
    }
    check(ok, "norm inequality 2^n*hs >= td^2");
  }

  // Symbolic Pauli pair trace matches the dense product.
  {
    bool ok = true;
    for (std::uint64_t i = 0; i < 16 && ok; ++i) {
      for (std::uint64_t j = 0; j < 16 && ok; ++j) {
        const PauliString p(2, i), q(2, j);
        const double dense = (pauli_dense_matrix(p) * pauli_dense_matrix(q)).trace().real();
        ok = std::abs(pauli_pair_trace(p, q) - dense) <= 1e-12;
      }
    }
    check(ok, "pauli_pair_trace vs dense trace, n = 2");
  }

  // Schedule totals are stable.
  check(predicted_budget(1, 1.0, 100) == 5443400ULL,
        "predicted_budget(1, 1.0, 100) == 5443400");

  out << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? kExitYes : kExitRuntime;
}

// ---------------------------------------------------------------------------

inline int execute(std::vector<std::string> args) {
  CLI::App app{"Quantum identity testing with two-outcome Pauli measurements"};
  app.require_subcommand(1);

  // identity ---------------------------------------------------------------
  auto* identity = app.add_subcommand("identity", "test two states for identity");
  std::string rho_text, sigma_text;
  std::optional<unsigned> id_n;
  double id_eps = 0.0;
  std::uint64_t id_L = kDefaultL;
  std::optional<double> id_mu;
  bool id_exclude_identity = false, id_no_early_exit = false, id_include_timing = false;
  std::uint64_t id_trials = 1;
  CommonArgs id_common;
  std::string id_emit_schedule;
  identity->add_option("--rho", rho_text, "state spec for rho")->required();
  identity->add_option("--sigma", sigma_text, "state spec for sigma")->required();
  identity->add_option("--n", id_n, "qubit count (required by 'mixed' specs)");
  identity->add_option("--eps", id_eps, "trace-distance gap of the promise")->required();
  identity->add_option("--L", id_L, "schedule repetition constant");
  identity->add_option("--mu", id_mu, "schedule weight exponent knob");
  identity->add_flag("--exclude-identity", id_exclude_identity,
                     "drop the identity word from the collection (m = 4^n - 1)");
  identity->add_flag("--no-early-exit", id_no_early_exit, "always run the full schedule");
  identity->add_flag("--include-timing", id_include_timing,
                     "embed wall_ms in reports (breaks byte-stable output)");
  identity->add_option("--trials", id_trials, "number of independent trials");
  add_seed_option(identity, id_common.seed);
  identity->add_option("--threads", id_common.threads, "worker threads (0 = auto)");
  identity->add_option("--out", id_common.out, "output path (default stdout)");
  identity->add_option("--emit-schedule", id_emit_schedule, "write the per-k schedule CSV here");

  // collection --------------------------------------------------------------
  auto* collection = app.add_subcommand("collection", "test a synthetic bias collection");
  std::string col_spec;
  double col_eps = 0.0;
  std::uint64_t col_L = kDefaultL;
  std::optional<double> col_mu;
  bool col_no_early_exit = false;
  std::uint64_t col_trials = 1;
  CommonArgs col_common;
  collection->add_option("--spec", col_spec, "JSON file with 'alpha' and 'beta' arrays")
      ->required();
  collection->add_option("--eps", col_eps, "collection-level distance parameter")->required();
  collection->add_option("--L", col_L, "schedule repetition constant");
  collection->add_option("--mu", col_mu, "schedule weight exponent knob");
  collection->add_flag("--no-early-exit", col_no_early_exit, "always run the full schedule");
  collection->add_option("--trials", col_trials, "number of independent trials");
  add_seed_option(collection, col_common.seed);
  collection->add_option("--threads", col_common.threads, "worker threads (0 = auto)");
  collection->add_option("--out", col_common.out, "output path (default stdout)");

  // mixedness ---------------------------------------------------------------
  auto* mixedness = app.add_subcommand("mixedness", "needle-ensemble advantage sweep");
  unsigned mx_n = 0;
  double mx_eps = 0.0;
  std::string mx_family = "full", mx_strategies = "uniform-split", mx_budgets;
  std::uint64_t mx_trials = 300;
  double mx_delta = kDefaultDetectorDelta;
  CommonArgs mx_common;
  mixedness->add_option("--n", mx_n, "qubit count")->required();
  mixedness->add_option("--eps", mx_eps, "needle strength")->required();
  mixedness->add_option("--family", mx_family, "needle family: full | xyz");
  mixedness->add_option("--strategies", mx_strategies,
                        "comma list: uniform-split, adaptive-greedy");
  mixedness->add_option("--budgets", mx_budgets, "comma list of total shot budgets")->required();
  mixedness->add_option("--trials", mx_trials, "Monte Carlo trials per cell (>= 100)");
  mixedness->add_option("--delta-d", mx_delta, "detector false-alarm budget");
  add_seed_option(mixedness, mx_common.seed);
  mixedness->add_option("--threads", mx_common.threads, "worker threads (0 = auto)");
  mixedness->add_option("--out", mx_common.out, "output path (default stdout)");
  mixedness->add_option("--format", mx_common.format, "csv | json");

  // schedule ----------------------------------------------------------------
  auto* schedule = app.add_subcommand("schedule", "print the per-k budget table");
  std::optional<std::uint64_t> sc_m;
  std::optional<unsigned> sc_n;
  double sc_eps = 0.0;
  std::uint64_t sc_L = kDefaultL;
  std::optional<double> sc_mu;
  bool sc_exclude_identity = false;
  CommonArgs sc_common;
  schedule->add_option("--m", sc_m, "collection size (direct collection schedule)");
  schedule->add_option("--n", sc_n, "qubit count (quantum schedule: m = 4^n, eps' reduction)");
  schedule->add_option("--eps", sc_eps, "distance parameter")->required();
  schedule->add_option("--L", sc_L, "schedule repetition constant");
  schedule->add_option("--mu", sc_mu, "schedule weight exponent knob");
  schedule->add_flag("--exclude-identity", sc_exclude_identity,
                     "drop the identity word (with --n)");
  schedule->add_option("--out", sc_common.out, "output path (default stdout)");
  schedule->add_option("--format", sc_common.format, "csv | json");

  // calibrate ---------------------------------------------------------------
  auto* calibrate = app.add_subcommand("calibrate", "empirical search for the smallest workable L");
  std::uint64_t ca_m = 64;
  double ca_eps = 0.25;
  std::uint64_t ca_trials = 200;
  std::string ca_ls = "1,2,5,10,20,50,100";
  CommonArgs ca_common;
  calibrate->add_option("--m", ca_m, "collection size");
  calibrate->add_option("--eps", ca_eps, "collection-level distance parameter");
  calibrate->add_option("--trials", ca_trials, "trials per L and case");
  calibrate->add_option("--Ls", ca_ls, "comma list of L values to probe");
  add_seed_option(calibrate, ca_common.seed);
  calibrate->add_option("--threads", ca_common.threads, "worker threads (0 = auto)");
  calibrate->add_option("--out", ca_common.out, "output path (default stdout)");

  // selftest ----------------------------------------------------------------
  app.add_subcommand("selftest", "run the exact-identity invariant suite");

  try {
    std::reverse(args.begin(), args.end());  // CLI11 consumes args back to front
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitYes;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (identity->parsed()) {
      return run_identity(rho_text, sigma_text, id_n, id_eps, id_L, id_mu, id_exclude_identity,
                          id_no_early_exit, id_trials, id_common, id_include_timing,
                          id_emit_schedule);
    }
    if (collection->parsed()) {
      return run_collection(col_spec, col_eps, col_L, col_mu, col_no_early_exit, col_trials,
                            col_common);
    }
    if (mixedness->parsed()) {
      return run_mixedness(mx_n, mx_eps, mx_family, mx_strategies, mx_budgets, mx_trials,
                           mx_delta, mx_common);
    }
    if (schedule->parsed()) {
      return run_schedule(sc_m, sc_n, sc_eps, sc_L, sc_mu, sc_exclude_identity, sc_common);
    }
    if (calibrate->parsed()) {
      return run_calibrate(ca_m, ca_eps, ca_trials, ca_ls, ca_common);
    }
    return run_selftest(std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace qit::cli
