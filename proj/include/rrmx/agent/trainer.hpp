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
#include "rrmx/agent/replay.hpp"
#include "rrmx/agent/state.hpp"
#include "rrmx/radar/environment.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <vector>

namespace rrmx::agent {

struct TrainOptions {
  std::int64_t slots = 50000;
  double eta = 1e7;
  double lambda0 = 5000.0;
  double alpha_lambda = 15000.0;
  Eigen::Index replay_capacity = 100000;
  Eigen::Index batch = 64;
  double noise_start = 0.5;
  double noise_end = 0.05;
  double noise_decay_fraction = 0.2;  // of `slots`
  std::uint64_t seed = 1;

  void validate() const {
    if (slots < 1) throw ContractViolation("TrainOptions: slots must be >= 1");
    if (!(eta > 0)) throw ContractViolation("TrainOptions: eta must be > 0");
    if (!(lambda0 >= 0)) throw ContractViolation("TrainOptions: lambda0 must be >= 0");
    if (!(alpha_lambda >= 0)) throw ContractViolation("TrainOptions: alpha_lambda must be >= 0");
    if (replay_capacity < 1 || batch < 1)
      throw ContractViolation("TrainOptions: replay capacity and batch must be >= 1");
    if (!(noise_start >= 0 && noise_end >= 0))
      throw ContractViolation("TrainOptions: noise levels must be >= 0");
    if (!(noise_decay_fraction >= 0 && noise_decay_fraction <= 1))
      throw ContractViolation("TrainOptions: noise_decay_fraction must be in [0, 1]");
  }

  /// Linear decay from noise_start to noise_end over the first
  /// noise_decay_fraction of the run, flat afterwards.
  double noise_at(std::int64_t slot) const {
    const double span = noise_decay_fraction * static_cast<double>(slots);
    if (span <= 0) return noise_end;
    const double f = std::min(1.0, static_cast<double>(slot) / span);
    return noise_start + (noise_end - noise_start) * f;
  }
};

/// lambda[t] is the multiplier in force during slot t (the one seen in the
/// state and charged in the reward).
struct TrainTrace {
  std::vector<double> reward;
  std::vector<double> utility;
  std::vector<double> usage;
  std::vector<double> lambda;

  std::size_t size() const { return reward.size(); }
};

struct TrainResult {
  DdpgAgent agent;
  TrainTrace trace;
  double final_lambda = 0.0;
};

using TrainProgress = std::function<void(std::int64_t slot, const DdpgAgent&, double lambda)>;

/// Online constrained DDPG: encode, act with exploration noise, step,
/// ascend the dual, store, one gradient update per slot.
inline TrainResult train(const radar::EnvConfig& env_cfg, const DdpgOptions& ddpg,
                         const TrainOptions& opts, const TrainProgress& progress = {}) {
  opts.validate();
  if (ddpg.n != env_cfg.max_targets)
    throw ContractViolation("train: agent N differs from environment N");
  radar::RadarEnvironment env(env_cfg, opts.seed);
  TrainResult res{DdpgAgent(ddpg, opts.seed), {}, 0.0};
  RandomStream explore_rng(opts.seed, 0xe0);
  RandomStream replay_rng(opts.seed, 0xe1);
  ReplayBuffer buffer(opts.replay_capacity, ddpg.state_dim(), ddpg.n);
  DualVariable dual{opts.lambda0, opts.alpha_lambda, env_cfg.reward.theta_max};
  dual.validate();

  auto& tr = res.trace;
  const auto n = static_cast<std::size_t>(opts.slots);
  tr.reward.reserve(n);
  tr.utility.reserve(n);
  tr.usage.reserve(n);
  tr.lambda.reserve(n);

  VectorXd s = encode_state(env.observe(), dual.lambda, opts.eta);
  for (std::int64_t t = 0; t < opts.slots; ++t) {
    const VectorXd a = res.agent.explore(s, opts.noise_at(t), explore_rng);
    const auto out = env.step(a, dual.lambda);
    tr.reward.push_back(out.reward);
    tr.utility.push_back(out.utility);
    tr.usage.push_back(out.usage);
    tr.lambda.push_back(dual.lambda);
    dual = dual_update(dual, out.usage);
    const VectorXd s2 = encode_state(env.observe(), dual.lambda, opts.eta);
    buffer.push(s, a, out.reward, s2);
    if (buffer.size() >= opts.batch) res.agent.update(buffer.sample(opts.batch, replay_rng));
    s = s2;
    if (progress) progress(t + 1, res.agent, dual.lambda);
  }
  res.final_lambda = dual.lambda;
  return res;
}

inline void write_trace_csv(std::ostream& os, const TrainTrace& tr) {
  os << "slot,reward,utility,usage,lambda\n";
  for (std::size_t t = 0; t < tr.size(); ++t)
    os << t << ',' << format_double(tr.reward[t]) << ',' << format_double(tr.utility[t]) << ','
       << format_double(tr.usage[t]) << ',' << format_double(tr.lambda[t]) << '\n';
}

}  // namespace rrmx::agent
