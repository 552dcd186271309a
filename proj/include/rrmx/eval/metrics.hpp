/*
 * Copyright 2026 The rrmx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "rrmx/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace rrmx::eval {

/// Compared policies, in tie-breaking order.
enum class Policy { kDdpg = 0, kLime = 1, kDlLime = 2 };
inline constexpr std::array<Policy, 3> kPolicies{Policy::kDdpg, Policy::kLime, Policy::kDlLime};

inline std::string to_string(Policy p) {
  switch (p) {
    case Policy::kDdpg: return "ddpg";
    case Policy::kLime: return "lime";
    case Policy::kDlLime: return "dl-lime";
  }
  return "?";
}

inline std::size_t index_of(Policy p) { return static_cast<std::size_t>(p); }

/// Mean absolute difference between two dwell vectors.
inline double mae(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) throw ContractViolation("mae: length mismatch");
  if (a.size() == 0) throw ContractViolation("mae: empty vectors");
  return (a - b).cwiseAbs().sum() / static_cast<double>(a.size());
}

using UtilityTraces = std::array<std::vector<double>, 3>;

/// Strict argmax of utility at slot t; earlier policies win ties.
inline Policy winner_at(const UtilityTraces& u, std::size_t t) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < 3; ++m)
    if (u[m].at(t) > u[best].at(t)) best = m;
  return kPolicies[best];
}

struct PeakPerformance {
  std::array<std::int64_t, 3> counts{0, 0, 0};
  // The last entry is 1 - (f0 + f1), so f0 + f1 + f2 == 1 exactly; it
  // differs from counts[2] / T by at most an ulp.
  std::array<double, 3> fractions{0.0, 0.0, 0.0};
};

inline PeakPerformance peak_performance(const UtilityTraces& u) {
  if (u[1].size() != u[0].size() || u[2].size() != u[0].size())
    throw ContractViolation("peak_performance: traces differ in length");
  if (u[0].empty()) throw ContractViolation("peak_performance: empty traces");
  PeakPerformance p;
  for (std::size_t t = 0; t < u[0].size(); ++t) ++p.counts[index_of(winner_at(u, t))];
  const auto T = static_cast<double>(u[0].size());
  p.fractions[0] = static_cast<double>(p.counts[0]) / T;
  p.fractions[1] = static_cast<double>(p.counts[1]) / T;
  p.fractions[2] = 1.0 - (p.fractions[0] + p.fractions[1]);
  return p;
}

struct Interval {
  double estimate = 0.0;  // mean of the data
  double lo = 0.0;
  double hi = 0.0;

  bool excludes_zero() const { return lo > 0.0 || hi < 0.0; }
};

namespace detail {

// Linear interpolation between order statistics.
inline double quantile_sorted(const std::vector<double>& v, double q) {
  const double h = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline Interval percentile_interval(const std::vector<double>& data, std::vector<double> stats,
                                    double level) {
  std::sort(stats.begin(), stats.end());
  const double tail = 0.5 * (1.0 - level);
  return {mean(data), quantile_sorted(stats, tail), quantile_sorted(stats, 1.0 - tail)};
}

inline void check_bootstrap(const std::vector<double>& x, int resamples, double level) {
  if (x.size() < 2) throw ContractViolation("bootstrap: need at least two observations");
  if (resamples < 1) throw ContractViolation("bootstrap: resamples must be >= 1");
  if (!(level > 0 && level < 1)) throw ContractViolation("bootstrap: level must be in (0, 1)");
}

}  // namespace detail

/// Percentile interval for the mean of paired differences, resampling pairs
/// with replacement.
inline Interval paired_bootstrap(const std::vector<double>& diffs, int resamples, double level,
                                 std::uint64_t seed) {
  detail::check_bootstrap(diffs, resamples, level);
  RandomStream rng(seed, 0xb007);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    double s = 0.0;
    for (std::size_t k = 0; k < diffs.size(); ++k) s += diffs[rng.index(diffs.size())];
    stats.push_back(s / static_cast<double>(diffs.size()));
  }
  return detail::percentile_interval(diffs, std::move(stats), level);
}

/// Moving-block bootstrap for the mean of an autocorrelated series.
inline Interval block_bootstrap(const std::vector<double>& series, std::size_t block,
                                int resamples, double level, std::uint64_t seed) {
  detail::check_bootstrap(series, resamples, level);
  const std::size_t n = series.size();
  block = std::clamp<std::size_t>(block, 1, n);
  RandomStream rng(seed, 0xb10c);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    double s = 0.0;
    std::size_t taken = 0;
    while (taken < n) {
      const std::size_t start = rng.index(n - block + 1);
      for (std::size_t k = 0; k < block && taken < n; ++k, ++taken) s += series[start + k];
    }
    stats.push_back(s / static_cast<double>(n));
  }
  return detail::percentile_interval(series, std::move(stats), level);
}

}  // namespace rrmx::eval
