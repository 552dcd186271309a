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

#include "rrmx/agent/state.hpp"
#include "rrmx/nn/dense_net.hpp"
#include "rrmx/nn/regression.hpp"

#include <cmath>

namespace rrmx::explain {

/// Rows [x_0, y_0, ..., x_{N-1}, y_{N-1}, lambda] of a state batch.
inline MatrixXd non_cost_part(const MatrixXd& states, int n) {
  const agent::StateLayout L{n};
  if (states.rows() != L.dim()) throw ContractViolation("non_cost_part: wrong state length");
  MatrixXd out(2 * n + 1, states.cols());
  out.topRows(2 * n) = states.topRows(2 * n);
  out.row(2 * n) = states.row(L.lambda());
  return out;
}

/// Predicts the N normalised tracking costs from the 2N+1 other state
/// components. Slots whose position pair is zero get exactly zero cost.
class CostNet {
 public:
  CostNet() = default;
  explicit CostNet(nn::DenseNet net) : net_(std::move(net)) {
    if (net_.out_dim() < 1 || net_.in_dim() != 2 * net_.out_dim() + 1)
      throw ContractViolation("CostNet: network must map 2N+1 inputs to N outputs");
  }

  int n() const { return static_cast<int>(net_.out_dim()); }
  const nn::DenseNet& net() const { return net_; }

  /// inputs: (2N+1) x K non-cost components; returns N x K costs.
  MatrixXd predict(const MatrixXd& inputs) const {
    if (inputs.rows() != net_.in_dim()) throw ContractViolation("CostNet: input dimension mismatch");
    MatrixXd c = net_.forward(inputs);
    for (Eigen::Index j = 0; j < inputs.cols(); ++j)
      for (Eigen::Index i = 0; i < c.rows(); ++i)
        if (inputs(2 * i, j) == 0.0 && inputs(2 * i + 1, j) == 0.0) c(i, j) = 0.0;
    return c;
  }

 private:
  nn::DenseNet net_;
};

struct CostNetOptions {
  std::vector<Eigen::Index> hidden{128, 64};
  int epochs = 30;
  double learning_rate = 1e-4;
  Eigen::Index batch_size = 64;
  double validation_fraction = 0.1;
  // Training happens in rescaled units (inputs and targets times these
  // gains); the gains are folded into the first and last layers afterwards.
  double input_gain = 1e3;
  double target_gain = 1e3;
  std::uint64_t seed = 1;
  Eigen::Index min_rows = 1000;
};

struct CostNetReport {
  std::vector<double> train_mse;       // per epoch, training units
  std::vector<double> validation_mse;  // per epoch, training units
  double final_validation_mse = 0.0;   // normalised-cost units
  double validation_target_var = 0.0;  // normalised-cost units
  double pearson_cost_range = 0.0;     // tracked validation entries
  Eigen::Index train_count = 0;
  Eigen::Index validation_count = 0;
};

struct TrainedCostNet {
  CostNet model;
  CostNetReport report;
};

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) return 0.0;
  const auto n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

/// states: (3N+1) x M normalised states. Validation rows are the held-out
/// tail of the seeded shuffle used by fit_regression.
inline TrainedCostNet train_costnet(const MatrixXd& states, int n, const CostNetOptions& opts) {
  const agent::StateLayout L{n};
  if (states.rows() != L.dim()) throw ContractViolation("train_costnet: wrong state length");
  if (states.cols() < opts.min_rows)
    throw ContractViolation("train_costnet: need at least " + std::to_string(opts.min_rows) +
                            " states, got " + std::to_string(states.cols()));
  const MatrixXd x = non_cost_part(states, n);
  const MatrixXd y = states.middleRows(2 * n, n);

  RandomStream init(opts.seed, 0xc057);
  std::vector<nn::LayerSpec> specs;
  for (auto w : opts.hidden) specs.push_back({w, nn::Activation::kRelu});
  specs.push_back({n, nn::Activation::kIdentity});
  nn::DenseNet net(2 * n + 1, specs, init);

  nn::RegressionOptions ro;
  ro.epochs = opts.epochs;
  ro.learning_rate = opts.learning_rate;
  ro.batch_size = opts.batch_size;
  ro.validation_fraction = opts.validation_fraction;
  ro.seed = opts.seed;
  const auto rep = nn::fit_regression(net, opts.input_gain * x, opts.target_gain * y, ro);

  net.layers().front().weight *= opts.input_gain;
  net.layers().back().weight /= opts.target_gain;
  net.layers().back().bias /= opts.target_gain;

  TrainedCostNet out{CostNet(std::move(net)), {}};
  auto& r = out.report;
  r.train_mse = rep.train_mse;
  r.validation_mse = rep.validation_mse;
  r.train_count = rep.train_count;
  r.validation_count = rep.validation_count;

  const auto val_idx = nn::validation_indices(states.cols(), ro);
  if (val_idx.empty()) return out;
  MatrixXd vx(x.rows(), static_cast<Eigen::Index>(val_idx.size()));
  MatrixXd vy(y.rows(), vx.cols());
  for (std::size_t j = 0; j < val_idx.size(); ++j) {
    vx.col(static_cast<Eigen::Index>(j)) = x.col(val_idx[j]);
    vy.col(static_cast<Eigen::Index>(j)) = y.col(val_idx[j]);
  }
  const MatrixXd pred = out.model.predict(vx);
  r.final_validation_mse = (pred - vy).squaredNorm() / static_cast<double>(vy.size());
  const double mean = vy.mean();
  r.validation_target_var = (vy.array() - mean).square().mean();
  std::vector<double> pc, rng;
  for (Eigen::Index j = 0; j < vx.cols(); ++j)
    for (int i = 0; i < n; ++i) {
      if (vx(2 * i, j) == 0.0 && vx(2 * i + 1, j) == 0.0) continue;
      pc.push_back(pred(i, j));
      rng.push_back(std::hypot(vx(2 * i, j), vx(2 * i + 1, j)));
    }
  r.pearson_cost_range = pearson(pc, rng);
  return out;
}

}  // namespace rrmx::explain
