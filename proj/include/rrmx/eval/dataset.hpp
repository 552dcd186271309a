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

#include "rrmx/agent/ddpg.hpp"
#include "rrmx/agent/dual.hpp"
#include "rrmx/agent/state.hpp"
#include "rrmx/eval/artifact.hpp"
#include "rrmx/explain/costnet.hpp"
#include "rrmx/radar/environment.hpp"

#include <cmath>
#include <vector>

namespace rrmx::eval {

/// What a policy rollout needs besides the policy: the scene, the state
/// normaliser, and the multiplier it starts from.
struct RolloutSetup {
  radar::EnvConfig env{};
  double eta = 1e7;
  agent::DualVariable dual{};
};

/// Experienced states from a greedy rollout, one column per slot. Costs are
/// the post-step tracking costs in m^2.
struct Dataset {
  int n = 0;
  std::vector<std::int64_t> slot;
  MatrixXd states;   // (3N+1) x M, normalised
  MatrixXd actions;  // N x M
  MatrixXd costs;    // N x M
  std::vector<double> utility;

  Eigen::Index size() const { return states.cols(); }
};

/// Noise-free rollout; lambda evolves from setup.dual by the dual update.
inline Dataset collect_dataset(const agent::ActorPolicy& policy, const RolloutSetup& setup,
                               std::int64_t slots, std::uint64_t seed) {
  if (slots < 1) throw ContractViolation("collect_dataset: slots must be >= 1");
  if (policy.n() != setup.env.max_targets)
    throw ContractViolation("collect_dataset: policy N differs from environment N");
  const int n = policy.n();
  radar::RadarEnvironment env(setup.env, seed);
  agent::DualVariable dual = setup.dual;
  Dataset d;
  d.n = n;
  d.states.resize(3 * n + 1, slots);
  d.actions.resize(n, slots);
  d.costs.resize(n, slots);
  for (std::int64_t t = 0; t < slots; ++t) {
    const VectorXd s = agent::encode_state(env.observe(), dual.lambda, setup.eta);
    const VectorXd a = policy(s);
    const auto out = env.step(a, dual.lambda);
    d.slot.push_back(t);
    d.states.col(t) = s;
    d.actions.col(t) = a;
    d.costs.col(t) = out.costs;
    d.utility.push_back(out.utility);
    dual = agent::dual_update(dual, out.usage);
  }
  return d;
}

inline void write_dataset_csv(std::ostream& os, const Dataset& d, const Stamp& stamp) {
  write_stamp(os, stamp);
  os << "slot";
  for (Eigen::Index i = 0; i < d.states.rows(); ++i) os << ",s_" << i;
  for (int i = 0; i < d.n; ++i) os << ",a_" << i;
  for (int i = 0; i < d.n; ++i) os << ",c_" << i;
  os << ",utility\n";
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    os << d.slot[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < d.states.rows(); ++i) os << ',' << format_double(d.states(i, j));
    for (int i = 0; i < d.n; ++i) os << ',' << format_double(d.actions(i, j));
    for (int i = 0; i < d.n; ++i) os << ',' << format_double(d.costs(i, j));
    os << ',' << format_double(d.utility[static_cast<std::size_t>(j)]) << '\n';
  }
}

/// Inverse of write_dataset_csv; N is inferred from the header.
inline Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!next_csv_line(is, line)) throw ParseError("dataset: missing header");
  const auto head = split_csv(line);
  const auto cols = static_cast<long>(head.size());
  if (cols < 8 || (cols - 3) % 5 != 0 || head.front() != "slot" || head.back() != "utility")
    throw ParseError("dataset: unexpected header");
  const int n = static_cast<int>((cols - 3) / 5);
  Dataset d;
  d.n = n;
  std::vector<std::vector<double>> rows;
  while (next_csv_line(is, line)) {
    const auto cells = split_csv(line);
    if (static_cast<long>(cells.size()) != cols)
      throw ParseError("dataset: row " + std::to_string(rows.size() + 1) + " has " +
                       std::to_string(cells.size()) + " cells, expected " + std::to_string(cols));
    std::vector<double> r;
    r.reserve(cells.size());
    for (const auto& c : cells) r.push_back(parse_double(c));
    rows.push_back(std::move(r));
  }
  const auto M = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index sd = 3 * n + 1;
  d.states.resize(sd, M);
  d.actions.resize(n, M);
  d.costs.resize(n, M);
  for (Eigen::Index j = 0; j < M; ++j) {
    const auto& r = rows[static_cast<std::size_t>(j)];
    d.slot.push_back(static_cast<std::int64_t>(r[0]));
    for (Eigen::Index i = 0; i < sd; ++i) d.states(i, j) = r[static_cast<std::size_t>(1 + i)];
    for (int i = 0; i < n; ++i) {
      d.actions(i, j) = r[static_cast<std::size_t>(1 + sd + i)];
      d.costs(i, j) = r[static_cast<std::size_t>(1 + sd + n + i)];
    }
    d.utility.push_back(r.back());
  }
  return d;
}

struct ScatterPoint {
  std::int64_t slot = 0;
  int target = 0;
  double distance = 0.0;  // m, from the tracked estimate
  double cost = 0.0;      // m^2
};

/// Tracked (estimate range, cost) pairs as seen in the recorded states.
inline std::vector<ScatterPoint> cost_range_scatter(const Dataset& d, double eta) {
  const agent::StateLayout L{d.n};
  std::vector<ScatterPoint> out;
  for (Eigen::Index j = 0; j < d.size(); ++j)
    for (int i = 0; i < d.n; ++i) {
      const double x = d.states(L.pos_x(i), j), y = d.states(L.pos_y(i), j);
      if (x == 0.0 && y == 0.0) continue;
      out.push_back({d.slot[static_cast<std::size_t>(j)], i, std::hypot(x, y) * eta,
                     d.states(L.cost(i), j) * eta});
    }
  return out;
}

inline double scatter_pearson(const std::vector<ScatterPoint>& pts) {
  std::vector<double> a, b;
  for (const auto& p : pts) {
    a.push_back(p.distance);
    b.push_back(p.cost);
  }
  return explain::pearson(a, b);
}

}  // namespace rrmx::eval
