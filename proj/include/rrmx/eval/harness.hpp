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

#include "rrmx/eval/dataset.hpp"
#include "rrmx/eval/metrics.hpp"
#include "rrmx/explain/lime.hpp"

#include <chrono>
#include <optional>

namespace rrmx::eval {

/// Everything an explainer needs beyond the policy and the anchor.
struct ExplainerKit {
  explain::EmpiricalMoments moments;
  explain::CostNet costnet;
  explain::ExplainConfig config{};  // method is set per call
};

inline ExplainerKit make_kit(const Dataset& d, explain::CostNet costnet,
                             const explain::ExplainConfig& cfg) {
  return {explain::empirical_moments(d.states), std::move(costnet), cfg};
}

inline explain::Explanation explain_with(const agent::ActorPolicy& policy, const VectorXd& s,
                                         const ExplainerKit& kit, explain::Method m,
                                         RandomStream& rng) {
  auto cfg = kit.config;
  cfg.method = m;
  const explain::CostNet* net = kit.costnet.n() > 0 ? &kit.costnet : nullptr;
  return explain::explain(policy, s, cfg, kit.moments, net, rng);
}

/// One paired comparison at a DDPG decision state.
struct CheckpointRecord {
  std::int64_t slot = 0;
  VectorXd anchor;
  VectorXd ddpg_action;
  double mae_lime = 0.0;
  double mae_dl_lime = 0.0;
  double runtime_ddpg = 0.0;  // one actor query, s
  double runtime_lime = 0.0;  // perturb + query + fit, s
  double runtime_dl_lime = 0.0;
  double utility = 0.0;  // executed by DDPG at this slot
  MatrixXd weight_lime;
  MatrixXd weight_dl_lime;
};

struct FidelityOptions {
  std::int64_t slots = 5000;
  std::int64_t interval = 100;
  std::uint64_t seed = 1;

  void validate() const {
    if (slots < 1) throw ContractViolation("fidelity: slots must be >= 1");
    if (interval < 1) throw ContractViolation("fidelity: checkpoint interval must be >= 1");
  }

  /// Checkpoints close each interval: slots interval-1, 2*interval-1, ...
  bool is_checkpoint(std::int64_t t) const { return (t + 1) % interval == 0; }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Both explainers at the same anchor draw from the same stream.
inline CheckpointRecord run_checkpoint(const agent::ActorPolicy& policy, const VectorXd& s,
                                       std::int64_t t, const ExplainerKit& kit,
                                       std::uint64_t seed) {
  CheckpointRecord r;
  r.slot = t;
  r.anchor = s;
  const auto t0 = std::chrono::steady_clock::now();
  r.ddpg_action = policy(s);
  r.runtime_ddpg = seconds_since(t0);
  const auto stream = 0x1000000ull + static_cast<std::uint64_t>(t);
  RandomStream ra(seed, stream), rb(seed, stream);
  const auto lime = explain_with(policy, s, kit, explain::Method::kLime, ra);
  const auto dl = explain_with(policy, s, kit, explain::Method::kDlLime, rb);
  r.mae_lime = mae(lime.predicted, r.ddpg_action);
  r.mae_dl_lime = mae(dl.predicted, r.ddpg_action);
  r.runtime_lime = lime.seconds;
  r.runtime_dl_lime = dl.seconds;
  r.weight_lime = lime.model.weight;
  r.weight_dl_lime = dl.model.weight;
  return r;
}

}  // namespace detail

/// DDPG rollout with LIME and DL-LIME fitted at every checkpoint state.
inline std::vector<CheckpointRecord> checkpoint_fidelity(const agent::ActorPolicy& policy,
                                                         const RolloutSetup& setup,
                                                         const ExplainerKit& kit,
                                                         const FidelityOptions& opts) {
  opts.validate();
  radar::RadarEnvironment env(setup.env, opts.seed);
  agent::DualVariable dual = setup.dual;
  std::vector<CheckpointRecord> out;
  for (std::int64_t t = 0; t < opts.slots; ++t) {
    const VectorXd s = agent::encode_state(env.observe(), dual.lambda, setup.eta);
    std::optional<CheckpointRecord> rec;
    if (opts.is_checkpoint(t)) rec = detail::run_checkpoint(policy, s, t, kit, opts.seed);
    const auto o = env.step(policy(s), dual.lambda);
    if (rec) {
      rec->utility = o.utility;
      out.push_back(std::move(*rec));
    }
    dual = agent::dual_update(dual, o.usage);
  }
  return out;
}

struct RolloutOptions {
  std::int64_t slots = 2000;
  std::uint64_t seed = 1;
  std::int64_t checkpoint_interval = 100;
  // Slots between surrogate refits; 0 picks 1 for runs up to 5000 slots and
  // checkpoint_interval beyond.
  std::int64_t refit_interval = 0;
  double action_bound = 2.5;

  void validate() const {
    if (slots < 1) throw ContractViolation("crn_rollouts: slots must be >= 1");
    if (checkpoint_interval < 1 || refit_interval < 0)
      throw ContractViolation("crn_rollouts: bad interval");
    if (!(action_bound > 0)) throw ContractViolation("crn_rollouts: action_bound must be > 0");
  }

  std::int64_t effective_refit() const {
    if (refit_interval > 0) return refit_interval;
    return slots <= 5000 ? 1 : checkpoint_interval;
  }
};

struct RolloutResult {
  UtilityTraces utility;
  std::array<std::vector<VectorXd>, 3> dwell;  // executed raw actions
  std::array<std::vector<double>, 3> lambda;   // in force during the slot
  std::array<std::vector<double>, 3> fit_seconds;  // 0 on slots reusing a fit
  std::vector<VectorXd> distances;  // DDPG replica truth ranges, 0 when empty
  std::vector<CheckpointRecord> checkpoints;  // on the DDPG replica
};

/// Surrogate model used as a policy: clipped to the action range and zeroed
/// on untracked slots, as the actor itself is.
inline VectorXd surrogate_action(const explain::LocalModel& m, const VectorXd& s, int n,
                                 double bound) {
  VectorXd a = m.predict(s).cwiseMax(0.0).cwiseMin(bound);
  return a.cwiseProduct(agent::tracked_mask(MatrixXd(s), n).col(0));
}

/// Three replicas built from the same seed, driven by DDPG, a LIME
/// surrogate, and a DL-LIME surrogate. Each replica runs its own multiplier.
inline RolloutResult crn_rollouts(const agent::ActorPolicy& policy, const RolloutSetup& setup,
                                  const ExplainerKit& kit, const RolloutOptions& opts) {
  opts.validate();
  if (policy.n() != setup.env.max_targets)
    throw ContractViolation("crn_rollouts: policy N differs from environment N");
  const int n = policy.n();
  const FidelityOptions fo{opts.slots, opts.checkpoint_interval, opts.seed};
  const auto refit = opts.effective_refit();
  std::vector<radar::RadarEnvironment> envs(3, radar::RadarEnvironment(setup.env, opts.seed));
  std::array<agent::DualVariable, 3> dual{setup.dual, setup.dual, setup.dual};
  std::array<std::optional<explain::LocalModel>, 3> model;
  RolloutResult r;
  for (std::int64_t t = 0; t < opts.slots; ++t) {
    VectorXd dist = VectorXd::Zero(n);
    const auto& truths = envs[0].truths();
    for (int i = 0; i < n; ++i)
      if (truths[static_cast<std::size_t>(i)]) dist(i) = truths[static_cast<std::size_t>(i)]->range();
    r.distances.push_back(dist);

    for (std::size_t m = 0; m < 3; ++m) {
      const VectorXd s = agent::encode_state(envs[m].observe(), dual[m].lambda, setup.eta);
      VectorXd a;
      double fit = 0.0;
      if (m == 0) {
        if (fo.is_checkpoint(t)) r.checkpoints.push_back(detail::run_checkpoint(policy, s, t, kit, opts.seed));
        a = policy(s);
      } else {
        if (!model[m] || t % refit == 0) {
          RandomStream rng(opts.seed, (static_cast<std::uint64_t>(m) << 32) | static_cast<std::uint64_t>(t));
          const auto e = explain_with(policy, s, kit,
                                      m == 1 ? explain::Method::kLime : explain::Method::kDlLime, rng);
          model[m] = e.model;
          fit = e.seconds;
        }
        a = surrogate_action(*model[m], s, n, opts.action_bound);
      }
      const auto o = envs[m].step(a, dual[m].lambda);
      if (m == 0 && fo.is_checkpoint(t)) r.checkpoints.back().utility = o.utility;
      r.utility[m].push_back(o.utility);
      r.dwell[m].push_back(a);
      r.lambda[m].push_back(dual[m].lambda);
      r.fit_seconds[m].push_back(fit);
      dual[m] = agent::dual_update(dual[m], o.usage);
    }
  }
  return r;
}

struct TradeoffRow {
  Eigen::Index samples = 0;
  double mean_mae = 0.0;
  double mean_runtime = 0.0;
};

struct TradeoffResult {
  std::vector<TradeoffRow> rows;
  std::vector<std::vector<double>> mae;  // [K index][state index]
};

/// One explainer at fixed states for each K; state j draws from the same
/// stream for every K.
inline TradeoffResult tradeoff_sweep(const agent::ActorPolicy& policy, const MatrixXd& states,
                                     const ExplainerKit& kit, const std::vector<Eigen::Index>& ks,
                                     explain::Method method, std::uint64_t seed) {
  if (ks.size() < 2) throw ContractViolation("tradeoff_sweep: need at least two K values");
  if (states.cols() < 1) throw ContractViolation("tradeoff_sweep: no states");
  TradeoffResult out;
  for (auto k : ks) {
    auto local = kit;
    local.config.samples = k;
    TradeoffRow row{k, 0.0, 0.0};
    std::vector<double> errs;
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
      RandomStream rng(seed, 0x3000000ull + static_cast<std::uint64_t>(j));
      const VectorXd s = states.col(j);
      const auto e = explain_with(policy, s, local, method, rng);
      errs.push_back(mae(e.predicted, e.policy_action));
      row.mean_runtime += e.seconds;
    }
    row.mean_mae = detail::mean(errs);
    row.mean_runtime /= static_cast<double>(states.cols());
    out.rows.push_back(row);
    out.mae.push_back(std::move(errs));
  }
  return out;
}

}  // namespace rrmx::eval
