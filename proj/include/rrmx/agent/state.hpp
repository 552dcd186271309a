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

#include "rrmx/radar/environment.hpp"

#include <string>
#include <vector>

namespace rrmx::agent {

/// Index arithmetic for the flat observation vector
/// [x_0, y_0, ..., x_{N-1}, y_{N-1}, c_0, ..., c_{N-1}, lambda].
struct StateLayout {
  int n = 5;

  Eigen::Index dim() const { return 3 * n + 1; }
  Eigen::Index pos_x(int i) const { return 2 * i; }
  Eigen::Index pos_y(int i) const { return 2 * i + 1; }
  Eigen::Index cost(int i) const { return 2 * n + i; }
  Eigen::Index lambda() const { return 3 * n; }
  bool is_cost(Eigen::Index k) const { return k >= 2 * n && k < 3 * n; }

  /// 1-based target names: x1, y1, ..., c1, ..., lambda.
  std::string feature_name(Eigen::Index k) const {
    if (k < 0 || k > lambda()) throw ContractViolation("feature_name: index out of range");
    if (k == lambda()) return "lambda";
    if (is_cost(k)) return "c" + std::to_string(k - 2 * n + 1);
    return std::string(k % 2 == 0 ? "x" : "y") + std::to_string(k / 2 + 1);
  }
};

/// Normalised observation. Untracked slots stay exactly zero.
inline VectorXd encode_state(const radar::Observation& obs, double lambda, double eta) {
  if (!(eta > 0)) throw ContractViolation("encode_state: eta must be > 0");
  const StateLayout L{static_cast<int>(obs.positions.size())};
  if (obs.costs.size() != L.n || obs.tracked.size() != obs.positions.size())
    throw ContractViolation("encode_state: observation fields disagree on N");
  VectorXd s = VectorXd::Zero(L.dim());
  for (int i = 0; i < L.n; ++i) {
    if (!obs.tracked[static_cast<std::size_t>(i)]) continue;
    s(L.pos_x(i)) = obs.positions[static_cast<std::size_t>(i)](0) / eta;
    s(L.pos_y(i)) = obs.positions[static_cast<std::size_t>(i)](1) / eta;
    s(L.cost(i)) = obs.costs(i) / eta;
  }
  s(L.lambda()) = lambda / eta;
  return s;
}

struct DecodedState {
  radar::Observation obs;
  double lambda = 0.0;
};

/// Inverse of encode_state. A slot counts as tracked when its position pair
/// is non-zero.
inline DecodedState decode_state(const VectorXd& s, int n, double eta) {
  const StateLayout L{n};
  if (s.size() != L.dim()) throw ContractViolation("decode_state: wrong state length");
  DecodedState d;
  d.obs.positions.assign(static_cast<std::size_t>(n), Vec2::Zero());
  d.obs.costs = VectorXd::Zero(n);
  d.obs.tracked.assign(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    const bool on = s(L.pos_x(i)) != 0.0 || s(L.pos_y(i)) != 0.0;
    if (!on) continue;
    d.obs.tracked[static_cast<std::size_t>(i)] = true;
    d.obs.positions[static_cast<std::size_t>(i)] = Vec2(s(L.pos_x(i)), s(L.pos_y(i))) * eta;
    d.obs.costs(i) = s(L.cost(i)) * eta;
  }
  d.lambda = s(L.lambda()) * eta;
  return d;
}

/// 1 where the slot's position pair is non-zero, 0 elsewhere; one column per
/// state column.
inline MatrixXd tracked_mask(const MatrixXd& states, int n) {
  const StateLayout L{n};
  if (states.rows() != L.dim()) throw ContractViolation("tracked_mask: wrong state length");
  MatrixXd m(n, states.cols());
  for (Eigen::Index j = 0; j < states.cols(); ++j)
    for (int i = 0; i < n; ++i)
      m(i, j) = (states(L.pos_x(i), j) != 0.0 || states(L.pos_y(i), j) != 0.0) ? 1.0 : 0.0;
  return m;
}

}  // namespace rrmx::agent
