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

#include "rrmx/radar/models.hpp"

#include <bit>
#include <limits>
#include <optional>
#include <vector>

namespace rrmx::radar {

/// Minimum-cost assignment of every row to a distinct column (rows <= cols),
/// O(n^2 m) shortest augmenting path form of the Hungarian method.
/// Returns the column chosen for each row.
inline std::vector<std::size_t> solve_assignment(const MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  const auto m = static_cast<std::size_t>(cost.cols());
  if (n > m) throw ContractViolation("solve_assignment: more rows than columns");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1),
                                static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

/// Global nearest neighbour association.
///
/// Minimises sum(assigned distances) + gate * (unassigned measurements) over
/// one-to-one assignments, where a pair may only be assigned if its distance
/// is within the gate. Result[i] is the track index for measurement i.
inline std::vector<std::optional<std::size_t>> gnn_associate(
    const std::vector<Vec2>& measurements, const std::vector<Vec2>& tracks, double gate) {
  const std::size_t nm = measurements.size();
  const std::size_t nt = tracks.size();
  std::vector<std::optional<std::size_t>> result(nm);
  if (nm == 0 || nt == 0) return result;

  // Forbidden pairs get a cost large enough that any feasible alternative
  // (the per-measurement dummy column) is preferred.
  const double forbidden = 1e6 * (gate + 1.0) * static_cast<double>(nm + nt);
  MatrixXd cost = MatrixXd::Constant(static_cast<Eigen::Index>(nm),
                                     static_cast<Eigen::Index>(nt + nm), forbidden);
  for (std::size_t i = 0; i < nm; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double d = (measurements[i] - tracks[j]).norm();
      if (d <= gate) cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
    }
    cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nt + i)) = gate;
  }
  const auto cols = solve_assignment(cost);
  for (std::size_t i = 0; i < nm; ++i) {
    const std::size_t j = cols[i];
    if (j < nt && (measurements[i] - tracks[j]).norm() <= gate) result[i] = j;
  }
  return result;
}

/// Shift a new scan result into a 4-scan history (bit 0 = most recent).
inline std::uint8_t push_history(std::uint8_t history, bool detected) {
  return static_cast<std::uint8_t>(((history << 1) | (detected ? 1u : 0u)) & 0x0Fu);
}

/// Three associated detections within four successive scans.
inline bool meets_confirmation(std::uint8_t history) {
  return std::popcount(static_cast<unsigned>(history & 0x0Fu)) >= 3;
}

/// Status implied by a history for a not-yet-confirmed target.
inline TrackStatus status_from_history(std::uint8_t history) {
  if (meets_confirmation(history)) return TrackStatus::kConfirmed;
  return (history & 0x0Fu) != 0 ? TrackStatus::kTentative : TrackStatus::kUntracked;
}

}  // namespace rrmx::radar
