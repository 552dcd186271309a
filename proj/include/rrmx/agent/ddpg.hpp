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

#include "rrmx/agent/replay.hpp"
#include "rrmx/agent/state.hpp"
#include "rrmx/nn/adam.hpp"
#include "rrmx/nn/dense_net.hpp"

#include <cmath>
#include <vector>

namespace rrmx::agent {

struct DdpgOptions {
  int n = 5;
  double action_bound = 2.5;
  std::vector<Eigen::Index> actor_hidden{256, 128};
  std::vector<Eigen::Index> critic_hidden{100, 100};
  double actor_lr = 2e-4;
  double critic_lr = 2e-4;
  double discount = 0.9;
  double rho = 0.005;
  // Both networks see sign(s) * log1p(input_gain * |s|) of the
  // eta-normalised state: O(1e-3) positions come out O(1), and runaway
  // covariances or multipliers stay in a range that does not saturate.
  double input_gain = 1e3;
  // Critic regresses scaled rewards so targets are O(1).
  double reward_scale = 1e-5;

  Eigen::Index state_dim() const { return 3 * n + 1; }

  void validate() const {
    if (n < 1) throw ContractViolation("DdpgOptions: n must be >= 1");
    if (!(action_bound > 0)) throw ContractViolation("DdpgOptions: action_bound must be > 0");
    if (!(discount >= 0 && discount < 1))
      throw ContractViolation("DdpgOptions: discount must be in [0, 1)");
    if (!(rho > 0 && rho <= 1)) throw ContractViolation("DdpgOptions: rho must be in (0, 1]");
    if (!(actor_lr > 0 && critic_lr > 0))
      throw ContractViolation("DdpgOptions: learning rates must be > 0");
    if (!(input_gain > 0 && reward_scale > 0))
      throw ContractViolation("DdpgOptions: gains must be > 0");
  }
};

/// Fixed, parameter-free input map shared by actor and critic.
inline MatrixXd compress_features(const MatrixXd& states, double gain) {
  return states.unaryExpr([gain](double v) {
    return v < 0 ? -std::log1p(-gain * v) : std::log1p(gain * v);
  });
}

/// A frozen deterministic policy: actor network, its input gain, and the
/// rule that untracked slots get zero dwell. Immutable once built.
class ActorPolicy {
 public:
  ActorPolicy(nn::DenseNet actor, double input_gain, int n)
      : actor_(std::move(actor)), gain_(input_gain), n_(n) {
    if (actor_.in_dim() != 3 * n + 1 || actor_.out_dim() != n)
      throw ContractViolation("ActorPolicy: actor dimensions do not match N");
  }

  int n() const { return n_; }
  Eigen::Index state_dim() const { return 3 * n_ + 1; }
  double input_gain() const { return gain_; }
  const nn::DenseNet& actor() const { return actor_; }

  /// states: (3N+1) x K, returns N x K.
  MatrixXd operator()(const MatrixXd& states) const {
    return actor_.forward(compress_features(states, gain_)).cwiseProduct(tracked_mask(states, n_));
  }

  VectorXd operator()(const VectorXd& s) const { return (*this)(MatrixXd(s)).col(0); }

 private:
  nn::DenseNet actor_;
  double gain_;
  int n_;
};

struct UpdateLosses {
  double critic_loss = 0.0;
  double actor_objective = 0.0;  // mean Q(s, actor(s)) in scaled-reward units
};

/// Actor-critic pair with target copies and one Adam optimiser each.
class DdpgAgent {
 public:
  DdpgAgent(DdpgOptions opts, std::uint64_t seed) : opts_(std::move(opts)) {
    opts_.validate();
    RandomStream init(seed, 0xac70);
    std::vector<nn::LayerSpec> a;
    for (auto w : opts_.actor_hidden) a.push_back({w, nn::Activation::kRelu});
    a.push_back({opts_.n, nn::Activation::kSquash, opts_.action_bound});
    std::vector<nn::LayerSpec> c;
    for (auto w : opts_.critic_hidden) c.push_back({w, nn::Activation::kRelu});
    c.push_back({1, nn::Activation::kIdentity});
    actor_ = nn::DenseNet(opts_.state_dim(), a, init);
    critic_ = nn::DenseNet(opts_.state_dim() + opts_.n, c, init);
    actor_target_ = actor_;
    critic_target_ = critic_;
    make_optimisers();
  }

  DdpgAgent(DdpgOptions opts, nn::DenseNet actor, nn::DenseNet critic, nn::DenseNet actor_target,
            nn::DenseNet critic_target)
      : opts_(std::move(opts)),
        actor_(std::move(actor)),
        critic_(std::move(critic)),
        actor_target_(std::move(actor_target)),
        critic_target_(std::move(critic_target)) {
    opts_.validate();
    const auto d = opts_.state_dim();
    if (actor_.in_dim() != d || actor_.out_dim() != opts_.n || actor_target_.in_dim() != d ||
        actor_target_.out_dim() != opts_.n || critic_.in_dim() != d + opts_.n ||
        critic_.out_dim() != 1 || critic_target_.in_dim() != d + opts_.n ||
        critic_target_.out_dim() != 1)
      throw ContractViolation("DdpgAgent: network dimensions do not match options");
    make_optimisers();
  }

  const DdpgOptions& options() const { return opts_; }
  const nn::DenseNet& actor() const { return actor_; }
  const nn::DenseNet& critic() const { return critic_; }
  const nn::DenseNet& actor_target() const { return actor_target_; }
  const nn::DenseNet& critic_target() const { return critic_target_; }

  ActorPolicy policy() const { return ActorPolicy(actor_, opts_.input_gain, opts_.n); }

  VectorXd act(const VectorXd& s) const { return policy()(s); }

  /// Q(s, a) in scaled-reward units, one value per column.
  VectorXd q_values(const MatrixXd& states, const MatrixXd& actions) const {
    return critic_.forward(critic_input(states, actions)).row(0).transpose();
  }

  /// Actor output plus N(0, sigma^2) noise, clipped to [0, bound], zero on
  /// untracked slots. Always consumes N normals.
  VectorXd explore(const VectorXd& s, double sigma, RandomStream& rng) const {
    VectorXd a = actor_.forward(compress_features(MatrixXd(s), opts_.input_gain)).col(0);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      a(i) = std::clamp(a(i) + sigma * rng.normal(), 0.0, opts_.action_bound);
    return a.cwiseProduct(tracked_mask(MatrixXd(s), opts_.n).col(0));
  }

  /// One critic step toward r + gamma Q'(s', actor'(s')), one actor step up
  /// the critic, then soft target updates.
  UpdateLosses update(const Batch& b) {
    const auto B = b.size();
    if (B == 0) throw ContractViolation("ddpg_update: empty batch");
    const double inv_b = 1.0 / static_cast<double>(B);
    UpdateLosses out;

    const MatrixXd next_mask = tracked_mask(b.next_states, opts_.n);
    const MatrixXd next_a =
        actor_target_.forward(compress_features(b.next_states, opts_.input_gain)).cwiseProduct(next_mask);
    const MatrixXd next_q = critic_target_.forward(critic_input(b.next_states, next_a));
    const MatrixXd y = (opts_.reward_scale * b.rewards).transpose() + opts_.discount * next_q;

    const auto c_cache = critic_.forward_cached(critic_input(b.states, b.actions));
    const MatrixXd diff = c_cache.output - y;
    out.critic_loss = diff.squaredNorm() * inv_b;
    const auto c_grad = critic_.backward(c_cache, 2.0 * inv_b * diff);
    critic_opt_.step(critic_, c_grad);

    const MatrixXd mask = tracked_mask(b.states, opts_.n);
    const auto a_cache = actor_.forward_cached(compress_features(b.states, opts_.input_gain));
    const MatrixXd pi = a_cache.output.cwiseProduct(mask);
    const auto q_cache = critic_.forward_cached(critic_input(b.states, pi));
    out.actor_objective = q_cache.output.sum() * inv_b;
    const auto q_grad = critic_.backward(q_cache, MatrixXd::Constant(1, B, -inv_b));
    const MatrixXd d_action = q_grad.input.bottomRows(opts_.n).cwiseProduct(mask);
    actor_opt_.step(actor_, actor_.backward(a_cache, d_action));

    actor_target_.blend_toward(actor_, opts_.rho);
    critic_target_.blend_toward(critic_, opts_.rho);
    return out;
  }

 private:
  MatrixXd critic_input(const MatrixXd& states, const MatrixXd& actions) const {
    MatrixXd x(states.rows() + actions.rows(), states.cols());
    x.topRows(states.rows()) = compress_features(states, opts_.input_gain);
    x.bottomRows(actions.rows()) = actions;
    return x;
  }

  void make_optimisers() {
    actor_opt_ = nn::Adam(actor_, nn::AdamOptions{.learning_rate = opts_.actor_lr});
    critic_opt_ = nn::Adam(critic_, nn::AdamOptions{.learning_rate = opts_.critic_lr});
  }

  DdpgOptions opts_;
  nn::DenseNet actor_;
  nn::DenseNet critic_;
  nn::DenseNet actor_target_;
  nn::DenseNet critic_target_;
  nn::Adam actor_opt_;
  nn::Adam critic_opt_;
};

/// Evaluation mode is sigma = 0.
inline VectorXd select_action(const DdpgAgent& agent, const VectorXd& s, double sigma,
                              RandomStream& rng) {
  if (sigma == 0.0) return agent.act(s);
  return agent.explore(s, sigma, rng);
}

}  // namespace rrmx::agent
