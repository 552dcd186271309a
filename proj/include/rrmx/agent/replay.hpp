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

namespace rrmx::agent {

/// Columns are transitions.
struct Batch {
  MatrixXd states;
  MatrixXd actions;
  VectorXd rewards;
  MatrixXd next_states;

  Eigen::Index size() const { return states.cols(); }
};

/// Fixed-capacity ring of (s, a, r, s') with uniform sampling (with
/// replacement). Storage is preallocated column-major.
class ReplayBuffer {
 public:
  ReplayBuffer(Eigen::Index capacity, Eigen::Index state_dim, Eigen::Index action_dim)
      : states_(state_dim, capacity),
        actions_(action_dim, capacity),
        rewards_(capacity),
        next_(state_dim, capacity) {
    if (capacity < 1) throw ContractViolation("ReplayBuffer: capacity must be >= 1");
  }

  Eigen::Index capacity() const { return rewards_.size(); }
  Eigen::Index size() const { return size_; }

  void push(const VectorXd& s, const VectorXd& a, double r, const VectorXd& s2) {
    if (s.size() != states_.rows() || s2.size() != states_.rows() || a.size() != actions_.rows())
      throw ContractViolation("ReplayBuffer::push: dimension mismatch");
    states_.col(head_) = s;
    actions_.col(head_) = a;
    rewards_(head_) = r;
    next_.col(head_) = s2;
    head_ = (head_ + 1) % capacity();
    size_ = std::min(size_ + 1, capacity());
  }

  Batch sample(Eigen::Index batch, RandomStream& rng) const {
    if (size_ == 0) throw ContractViolation("ReplayBuffer::sample: buffer is empty");
    if (batch < 1) throw ContractViolation("ReplayBuffer::sample: batch must be >= 1");
    Batch b;
    b.states.resize(states_.rows(), batch);
    b.actions.resize(actions_.rows(), batch);
    b.rewards.resize(batch);
    b.next_states.resize(states_.rows(), batch);
    for (Eigen::Index j = 0; j < batch; ++j) {
      const auto k = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(size_)));
      b.states.col(j) = states_.col(k);
      b.actions.col(j) = actions_.col(k);
      b.rewards(j) = rewards_(k);
      b.next_states.col(j) = next_.col(k);
    }
    return b;
  }

 private:
  MatrixXd states_;
  MatrixXd actions_;
  VectorXd rewards_;
  MatrixXd next_;
  Eigen::Index head_ = 0;
  Eigen::Index size_ = 0;
};

}  // namespace rrmx::agent
