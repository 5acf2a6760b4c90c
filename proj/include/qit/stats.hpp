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
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qit {

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval for a binomial proportion (default z = 1.96).
inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                      double z = 1.96) {
  if (trials == 0) {
    throw std::invalid_argument("wilson_interval: trials must be positive");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) {
    return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Counts trials where trial_fn returns true. Each trial must derive all of
/// its randomness from its own index (per-trial substreams), which makes the
/// count independent of the thread split.
inline std::uint64_t count_successes(std::uint64_t trials, unsigned threads,
                                     const std::function<bool(std::uint64_t)>& trial_fn) {
  const auto cap = static_cast<unsigned>(std::min<std::uint64_t>(trials == 0 ? 1 : trials, 64));
  threads = std::clamp(threads, 1u, cap);
  if (threads <= 1 || trials < 2) {
    std::uint64_t successes = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      successes += trial_fn(t) ? 1 : 0;
    }
    return successes;
  }
  std::vector<std::uint64_t> partial(threads, 0);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        std::uint64_t local = 0;
        for (std::uint64_t t = w; t < trials; t += threads) {
          local += trial_fn(t) ? 1 : 0;
        }
        partial[w] = local;
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) {
    worker.join();
  }
  for (const auto& error : errors) {
    if (error) {
      std::rethrow_exception(error);
    }
  }
  std::uint64_t successes = 0;
  for (const auto s : partial) {
    successes += s;
  }
  return successes;
}

/// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_slope: need matching arrays with at least 2 points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_slope: x values are all equal");
  }
  return sxy / sxx;
}

}  // namespace qit
