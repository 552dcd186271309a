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

// Independent reference computations used only by tests. Nothing here calls
// into the code paths it is used to check.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

/// trace(E P E^T) with E = [I_2 0] multiplied out element by element.
inline double projected_position_trace(const Eigen::Matrix4d& P) {
  double E[2][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}};
  double EP[2][4] = {};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) EP[i][j] += E[i][k] * P(k, j);
  double out[2][2] = {};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 4; ++k) out[i][j] += EP[i][k] * E[j][k];
  return out[0][0] + out[1][1];
}

/// GNN objective: assigned distances plus `gate` per unassigned measurement.
/// Returns +inf for an assignment that violates the gate or one-to-one rule.
inline double gnn_objective(const std::vector<Eigen::Vector2d>& meas,
                            const std::vector<Eigen::Vector2d>& tracks,
                            const std::vector<std::optional<std::size_t>>& assign, double gate) {
  std::vector<bool> used(tracks.size(), false);
  double total = 0.0;
  for (std::size_t i = 0; i < meas.size(); ++i) {
    if (!assign[i]) {
      total += gate;
      continue;
    }
    const std::size_t j = *assign[i];
    if (j >= tracks.size() || used[j]) return std::numeric_limits<double>::infinity();
    used[j] = true;
    const double d = (meas[i] - tracks[j]).norm();
    if (d > gate) return std::numeric_limits<double>::infinity();
    total += d;
  }
  return total;
}

/// Exhaustive minimum of gnn_objective over every partial injective map.
inline double brute_force_gnn(const std::vector<Eigen::Vector2d>& meas,
                              const std::vector<Eigen::Vector2d>& tracks, double gate) {
  std::vector<std::optional<std::size_t>> cur(meas.size());
  std::vector<bool> used(tracks.size(), false);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == meas.size()) {
      best = std::min(best, gnn_objective(meas, tracks, cur, gate));
      return;
    }
    cur[i].reset();
    rec(i + 1);
    for (std::size_t j = 0; j < tracks.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      cur[i] = j;
      rec(i + 1);
      used[j] = false;
    }
    cur[i].reset();
  };
  rec(0);
  return best;
}

/// Dense Gaussian elimination with partial pivoting on a copy of A.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (A[piv][col] == 0.0) throw std::runtime_error("gauss_solve: singular");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= A[i][c] * x[c];
    x[i] = s / A[i][i];
  }
  return x;
}

/// Weighted ridge with unpenalised intercept via the augmented normal
/// equations, solved by gauss_solve. X is K x d (rows are samples); returns
/// [w_0 .. w_{d-1}, b].
inline std::vector<double> ridge_normal_equations(const std::vector<std::vector<double>>& X,
                                                  const std::vector<double>& y,
                                                  const std::vector<double>& weights, double c) {
  const std::size_t K = X.size();
  const std::size_t d = X.empty() ? 0 : X[0].size();
  const std::size_t n = d + 1;
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<double> row(X[k]);
    row.push_back(1.0);
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] += weights[k] * row[i] * y[k];
      for (std::size_t j = 0; j < n; ++j) A[i][j] += weights[k] * row[i] * row[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) A[i][i] += c;
  return gauss_solve(A, rhs);
}

/// Plain gradient descent on the weighted ridge loss (same parameterisation
/// as ridge_normal_equations), run to convergence.
inline std::vector<double> ridge_gradient_descent(const std::vector<std::vector<double>>& X,
                                                  const std::vector<double>& y,
                                                  const std::vector<double>& weights, double c,
                                                  int iterations, double step) {
  const std::size_t K = X.size();
  const std::size_t d = X[0].size();
  std::vector<double> theta(d + 1, 0.0);
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      double pred = theta[d];
      for (std::size_t i = 0; i < d; ++i) pred += theta[i] * X[k][i];
      const double r = weights[k] * (pred - y[k]);
      for (std::size_t i = 0; i < d; ++i) g[i] += 2.0 * r * X[k][i];
      g[d] += 2.0 * r;
    }
    for (std::size_t i = 0; i < d; ++i) g[i] += 2.0 * c * theta[i];
    for (std::size_t i = 0; i <= d; ++i) theta[i] -= step * g[i];
  }
  return theta;
}

}  // namespace oracle
