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

#include "rrmx/agent/checkpoint.hpp"
#include "rrmx/agent/ddpg.hpp"
#include "rrmx/agent/dual.hpp"
#include "rrmx/agent/replay.hpp"
#include "rrmx/agent/state.hpp"
#include "rrmx/agent/trainer.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace rrmx::agent {
namespace {

radar::Observation empty_obs(int n) {
  radar::Observation o;
  o.positions.assign(static_cast<std::size_t>(n), Vec2::Zero());
  o.costs = VectorXd::Zero(n);
  o.tracked.assign(static_cast<std::size_t>(n), false);
  return o;
}

DdpgOptions small_options(int n = 5) {
  DdpgOptions o;
  o.n = n;
  o.actor_hidden = {16, 16};
  o.critic_hidden = {16, 16};
  return o;
}

// --- state ------------------------------------------------------------------

TEST(State, NoTracksOnlyLambda) {
  const VectorXd s = encode_state(empty_obs(5), 5000.0, 1e7);
  ASSERT_EQ(s.size(), 16);
  for (int i = 0; i < 15; ++i) EXPECT_EQ(s(i), 0.0);
  EXPECT_DOUBLE_EQ(s(15), 5e-4);
}

TEST(State, OneTrackLayout) {
  auto o = empty_obs(5);
  o.tracked[0] = true;
  o.positions[0] = Vec2(1e4, 2e4);
  o.costs(0) = 1e5;
  const VectorXd s = encode_state(o, 0.0, 1e7);
  EXPECT_DOUBLE_EQ(s(0), 1e-3);
  EXPECT_DOUBLE_EQ(s(1), 2e-3);
  EXPECT_DOUBLE_EQ(s(10), 1e-2);
  EXPECT_EQ((s.array() != 0.0).count(), 3);
}

TEST(State, UntrackedSlotsIgnoreStaleValues) {
  auto o = empty_obs(5);
  o.positions[3] = Vec2(7, 8);  // not tracked: must not leak
  o.costs(3) = 9;
  const VectorXd s = encode_state(o, 1.0, 10.0);
  EXPECT_EQ(s.head(15), VectorXd::Zero(15));
}

TEST(State, DecodeInvertsEncodeOnTrackedSlots) {
  RandomStream rng(1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    auto o = empty_obs(5);
    for (int i = 0; i < 5; ++i) {
      if (rng.uniform() < 0.5) continue;
      o.tracked[static_cast<std::size_t>(i)] = true;
      o.positions[static_cast<std::size_t>(i)] = Vec2(rng.uniform(-2e4, 2e4), rng.uniform(-2e4, 2e4));
      o.costs(i) = rng.uniform(0, 1e5);
    }
    const double lambda = rng.uniform(0, 1e4);
    const auto d = decode_state(encode_state(o, lambda, 1e7), 5, 1e7);
    EXPECT_NEAR(d.lambda, lambda, 1e-9);
    for (std::size_t i = 0; i < 5; ++i) {
      ASSERT_EQ(d.obs.tracked[i], o.tracked[i]);
      if (!o.tracked[i]) continue;
      EXPECT_NEAR((d.obs.positions[i] - o.positions[i]).norm(), 0.0, 1e-8);
      EXPECT_NEAR(d.obs.costs(static_cast<Eigen::Index>(i)), o.costs(static_cast<Eigen::Index>(i)), 1e-8);
    }
  }
}

TEST(State, FeatureNames) {
  const StateLayout L{5};
  EXPECT_EQ(L.feature_name(0), "x1");
  EXPECT_EQ(L.feature_name(9), "y5");
  EXPECT_EQ(L.feature_name(11), "c2");
  EXPECT_EQ(L.feature_name(15), "lambda");
  EXPECT_THROW(L.feature_name(16), ContractViolation);
}

// --- dual -------------------------------------------------------------------

TEST(Dual, Examples) {
  EXPECT_DOUBLE_EQ(dual_update({5000, 15000, 0.9}, 0.9).lambda, 5000.0);
  EXPECT_DOUBLE_EQ(dual_update({0, 15000, 0.9}, 0.8).lambda, 0.0);
  EXPECT_DOUBLE_EQ(dual_update({5000, 15000, 0.9}, 1.0).lambda, 6500.0);
  EXPECT_THROW(dual_update({5000, 15000, 0.9}, -0.1), ContractViolation);
}

TEST(Dual, NeverNegative) {
  RandomStream rng(2, 2);
  DualVariable d{5000, 15000, 0.9};
  for (int i = 0; i < 10000; ++i) {
    d = dual_update(d, rng.uniform(0, 2));
    ASSERT_GE(d.lambda, 0.0);
  }
}

// --- replay -----------------------------------------------------------------

TEST(Replay, RingKeepsNewestAndBoundsSize) {
  ReplayBuffer buf(3, 1, 1);
  for (int i = 0; i < 5; ++i)
    buf.push(VectorXd::Constant(1, i), VectorXd::Constant(1, i), i, VectorXd::Constant(1, i));
  EXPECT_EQ(buf.size(), 3);
  RandomStream rng(3, 3);
  const auto b = buf.sample(300, rng);
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    EXPECT_GE(b.rewards(j), 2.0);
    EXPECT_EQ(b.states(0, j), b.rewards(j));
  }
}

TEST(Replay, SamplingIsRoughlyUniform) {
  ReplayBuffer buf(4, 1, 1);
  for (int i = 0; i < 4; ++i) buf.push(VectorXd::Zero(1), VectorXd::Zero(1), i, VectorXd::Zero(1));
  RandomStream rng(4, 4);
  const auto b = buf.sample(40000, rng);
  std::vector<int> count(4, 0);
  for (Eigen::Index j = 0; j < b.size(); ++j) ++count[static_cast<std::size_t>(b.rewards(j))];
  for (int c : count) EXPECT_NEAR(c / 40000.0, 0.25, 0.01);
}

TEST(Replay, EmptyAndMismatchRejected) {
  ReplayBuffer buf(2, 3, 1);
  RandomStream rng(5, 5);
  EXPECT_THROW(buf.sample(1, rng), ContractViolation);
  EXPECT_THROW(buf.push(VectorXd::Zero(2), VectorXd::Zero(1), 0, VectorXd::Zero(3)), ContractViolation);
}

// --- actions ----------------------------------------------------------------

TEST(Action, DeterministicWithoutNoise) {
  DdpgAgent agent(small_options(), 1);
  RandomStream rng(6, 6);
  VectorXd s = VectorXd::Zero(16);
  s << 1e-3, 2e-4, 0, 0, -5e-4, 1e-3, 0, 0, 0, 0, 1e-4, 0, 3e-5, 0, 0, 5e-4;
  EXPECT_EQ(select_action(agent, s, 0.0, rng), select_action(agent, s, 0.0, rng));
}

TEST(Action, BoundedAndMaskedUnderHeavyNoise) {
  DdpgAgent agent(small_options(), 2);
  RandomStream rng(7, 7);
  for (int trial = 0; trial < 500; ++trial) {
    VectorXd s = VectorXd::Zero(16);
    std::vector<bool> on(5);
    for (int i = 0; i < 5; ++i) {
      on[static_cast<std::size_t>(i)] = rng.uniform() < 0.6;
      if (!on[static_cast<std::size_t>(i)]) continue;
      s(2 * i) = rng.uniform(-2e-3, 2e-3);
      s(2 * i + 1) = rng.uniform(-2e-3, 2e-3);
      s(10 + i) = rng.uniform(0, 1e-2);
    }
    s(15) = rng.uniform(0, 1e-2);
    const VectorXd a = select_action(agent, s, 3.0, rng);
    for (int i = 0; i < 5; ++i) {
      EXPECT_GE(a(i), 0.0);
      EXPECT_LE(a(i), 2.5);
      if (!on[static_cast<std::size_t>(i)]) EXPECT_EQ(a(i), 0.0);
    }
  }
}

// --- ddpg update ------------------------------------------------------------

Batch random_batch(RandomStream& rng, int n, Eigen::Index B) {
  Batch b;
  const Eigen::Index d = 3 * n + 1;
  b.states = MatrixXd(d, B);
  b.next_states = MatrixXd(d, B);
  b.actions = MatrixXd(n, B);
  b.rewards = VectorXd(B);
  for (Eigen::Index j = 0; j < B; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      b.states(i, j) = rng.uniform(-1e-3, 1e-3);
      b.next_states(i, j) = rng.uniform(-1e-3, 1e-3);
    }
    for (int i = 0; i < n; ++i) b.actions(i, j) = rng.uniform(0, 2.5);
    b.rewards(j) = rng.uniform(-1e5, 1e5);
  }
  return b;
}

TEST(Ddpg, UnitRhoCopiesLiveIntoTargets) {
  auto o = small_options();
  o.rho = 1.0;
  DdpgAgent agent(o, 3);
  RandomStream rng(8, 8);
  agent.update(random_batch(rng, 5, 32));
  EXPECT_TRUE(agent.actor_target() == agent.actor());
  EXPECT_TRUE(agent.critic_target() == agent.critic());
}

TEST(Ddpg, SmallRhoMovesTargetsOnlySlightly) {
  auto o = small_options();
  DdpgAgent agent(o, 3);
  const auto before = agent.actor_target();
  RandomStream rng(8, 8);
  agent.update(random_batch(rng, 5, 32));
  EXPECT_FALSE(agent.actor_target() == before);
  EXPECT_FALSE(agent.actor_target() == agent.actor());
}

TEST(Ddpg, CriticFitsConstantRewardWithZeroDiscount) {
  auto o = small_options();
  o.discount = 0.0;
  o.critic_lr = 1e-3;
  o.reward_scale = 1e-5;
  DdpgAgent agent(o, 4);
  RandomStream rng(9, 9);
  Batch b = random_batch(rng, 5, 64);
  b.rewards.setConstant(1.7e5);  // scaled target 1.7
  UpdateLosses last;
  for (int it = 0; it < 3000; ++it) last = agent.update(b);
  EXPECT_LT(last.critic_loss, 1e-2);
  const VectorXd q = agent.q_values(b.states, b.actions);
  EXPECT_LT((q.array() - 1.7).abs().maxCoeff(), 0.1);
  EXPECT_THROW(agent.update(Batch{}), ContractViolation);
}

// One target slot, reward -(a - g(s))^2 with g depending on the x position.
// gamma = 0 makes this a contextual bandit; the oracle is a grid search.
double bandit_reward(const VectorXd& s, double a) {
  const double g = 1.25 + 500.0 * s(0);  // s(0) in [-1e-3, 1e-3]
  return -(a - g) * (a - g);
}

TEST(Ddpg, ActorFindsContextualBanditOptimum) {
  auto o = small_options(1);
  o.discount = 0.0;
  o.actor_hidden = {32, 32};
  o.critic_hidden = {64, 64};
  o.actor_lr = 1e-3;
  o.critic_lr = 2e-3;
  o.reward_scale = 1.0;
  o.rho = 0.05;
  DdpgAgent agent(o, 5);
  RandomStream rng(10, 10);
  ReplayBuffer buf(20000, 4, 1);
  auto random_state = [&] {
    VectorXd s(4);
    s << rng.uniform(-1e-3, 1e-3), 5e-4, 1e-4, 0.0;
    return s;
  };
  for (int i = 0; i < 5000; ++i) {
    const VectorXd s = random_state();
    const double a = rng.uniform(0, 2.5);
    buf.push(s, VectorXd::Constant(1, a), bandit_reward(s, a), s);
  }
  for (int it = 0; it < 8000; ++it) agent.update(buf.sample(64, rng));

  for (double x : {-8e-4, -3e-4, 0.0, 4e-4, 9e-4}) {
    VectorXd s(4);
    s << x, 5e-4, 1e-4, 0.0;
    double best_a = 0, best_r = -1e300;
    for (int k = 0; k <= 2500; ++k) {
      const double a = 0.001 * k;
      const double r = bandit_reward(s, a);
      if (r > best_r) {
        best_r = r;
        best_a = a;
      }
    }
    EXPECT_NEAR(agent.act(s)(0), best_a, 0.1) << "x = " << x;
  }
}

// --- training ---------------------------------------------------------------

radar::EnvConfig busy_env() {
  radar::EnvConfig e;
  e.join_interval = 5;
  e.join_prob = 0.5;
  e.initial_targets = 3;
  return e;
}

TrainOptions short_run() {
  TrainOptions t;
  t.slots = 300;
  t.batch = 16;
  t.seed = 11;
  return t;
}

TEST(Train, LambdaNonNegativeAndTracesSized) {
  const auto res = train(busy_env(), small_options(), short_run());
  ASSERT_EQ(res.trace.size(), 300u);
  for (double l : res.trace.lambda) ASSERT_GE(l, 0.0);
  EXPECT_GE(res.final_lambda, 0.0);
  EXPECT_DOUBLE_EQ(res.trace.lambda.front(), 5000.0);
}

TEST(Train, FixedSeedIsBitIdentical) {
  const auto a = train(busy_env(), small_options(), short_run());
  const auto b = train(busy_env(), small_options(), short_run());
  EXPECT_EQ(a.trace.reward, b.trace.reward);
  EXPECT_EQ(a.trace.lambda, b.trace.lambda);
  EXPECT_TRUE(a.agent.actor() == b.agent.actor());
  auto other = short_run();
  other.seed = 12;
  EXPECT_NE(train(busy_env(), small_options(), other).trace.reward, a.trace.reward);
}

TEST(Train, NoiseScheduleDecaysThenHolds) {
  TrainOptions t;
  t.slots = 1000;
  EXPECT_DOUBLE_EQ(t.noise_at(0), 0.5);
  EXPECT_NEAR(t.noise_at(100), 0.275, 1e-12);
  EXPECT_DOUBLE_EQ(t.noise_at(200), 0.05);
  EXPECT_DOUBLE_EQ(t.noise_at(999), 0.05);
}

TEST(Train, MismatchedNRejected) {
  EXPECT_THROW(train(busy_env(), small_options(4), short_run()), ContractViolation);
}

TEST(Train, TraceCsvSchema) {
  TrainTrace tr;
  tr.reward = {1.5, 2};
  tr.utility = {3, 4};
  tr.usage = {0.5, 0.25};
  tr.lambda = {5000, 0};
  std::ostringstream os;
  write_trace_csv(os, tr);
  EXPECT_EQ(os.str(), "slot,reward,utility,usage,lambda\n0,1.5,3,0.5,5000\n1,2,4,0.25,0\n");
}

TEST(Checkpoint, RoundTripRestoresPolicy) {
  DdpgAgent agent(small_options(), 13);
  RandomStream rng(14, 14);
  agent.update(random_batch(rng, 5, 8));
  const auto dir = std::filesystem::path(testing::TempDir()) / "rrmx_ckpt_test";
  std::filesystem::remove_all(dir);
  save_checkpoint(dir, agent, 1234.5, "abc123", 77);
  const auto ck = load_checkpoint(dir);
  EXPECT_TRUE(ck.agent.actor() == agent.actor());
  EXPECT_TRUE(ck.agent.critic_target() == agent.critic_target());
  EXPECT_EQ(ck.lambda, 1234.5);
  EXPECT_EQ(ck.config_hash, "abc123");
  EXPECT_EQ(ck.seed, 77u);
  EXPECT_EQ(ck.agent.options().actor_hidden, agent.options().actor_hidden);
  std::filesystem::remove(dir / "checkpoint.txt");
  EXPECT_THROW(load_checkpoint(dir), ParseError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace rrmx::agent
