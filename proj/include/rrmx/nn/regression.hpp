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

#include "rrmx/nn/adam.hpp"
#include "rrmx/nn/dense_net.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace rrmx::nn {

struct RegressionOptions {
  int epochs = 20;
  double learning_rate = 1e-3;
  Eigen::Index batch_size = 64;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct RegressionReport {
  std::vector<double> train_mse;       // per epoch
  std::vector<double> validation_mse;  // per epoch, on the held-out tail
  Eigen::Index train_count = 0;
  Eigen::Index validation_count = 0;
};

inline double mse(const DenseNet& net, const MatrixXd& inputs, const MatrixXd& targets) {
  if (inputs.cols() == 0) return 0.0;
  const MatrixXd err = net.forward(inputs) - targets;
  return err.squaredNorm() / static_cast<double>(err.size());
}

inline Eigen::Index validation_count(Eigen::Index total, const RegressionOptions& opts) {
  if (total <= 1) return 0;
  const auto n = static_cast<Eigen::Index>(opts.validation_fraction * static_cast<double>(total));
  return std::clamp<Eigen::Index>(n, 0, total - 1);
}

/// Column indices fit_regression holds out for validation, in order.
inline std::vector<Eigen::Index> validation_indices(Eigen::Index total,
                                                    const RegressionOptions& opts) {
  RandomStream rng(opts.seed, 0xfeed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  const auto n_val = validation_count(total, opts);
  return {order.end() - n_val, order.end()};
}

/// Mini-batch MSE regression with Adam. Columns are samples; the last
/// `validation_fraction` of the columns (after a seeded shuffle) is held out.
inline RegressionReport fit_regression(DenseNet& net, const MatrixXd& inputs,
                                       const MatrixXd& targets, const RegressionOptions& opts) {
  if (inputs.cols() == 0) throw ContractViolation("fit_regression: empty dataset");
  if (inputs.cols() != targets.cols())
    throw ContractViolation("fit_regression: input/target count mismatch");
  if (inputs.rows() != net.in_dim() || targets.rows() != net.out_dim())
    throw ContractViolation("fit_regression: dimension mismatch with network");

  RandomStream rng(opts.seed, 0xfeed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(inputs.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng.engine());

  const auto total = inputs.cols();
  const Eigen::Index n_val = validation_count(total, opts);
  const Eigen::Index n_train = total - n_val;

  auto gather = [&](const MatrixXd& src, Eigen::Index begin, Eigen::Index count) {
    MatrixXd out(src.rows(), count);
    for (Eigen::Index j = 0; j < count; ++j)
      out.col(j) = src.col(order[static_cast<std::size_t>(begin + j)]);
    return out;
  };
  const MatrixXd x_train = gather(inputs, 0, n_train);
  const MatrixXd y_train = gather(targets, 0, n_train);
  const MatrixXd x_val = gather(inputs, n_train, n_val);
  const MatrixXd y_val = gather(targets, n_train, n_val);

  Adam adam(net, AdamOptions{.learning_rate = opts.learning_rate});
  RegressionReport report;
  report.train_count = n_train;
  report.validation_count = n_val;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n_train));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const Eigen::Index bs = std::max<Eigen::Index>(1, opts.batch_size);

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    double sum_sq = 0.0;
    for (Eigen::Index start = 0; start < n_train; start += bs) {
      const Eigen::Index count = std::min(bs, n_train - start);
      MatrixXd xb(x_train.rows(), count), yb(y_train.rows(), count);
      for (Eigen::Index j = 0; j < count; ++j) {
        xb.col(j) = x_train.col(idx[static_cast<std::size_t>(start + j)]);
        yb.col(j) = y_train.col(idx[static_cast<std::size_t>(start + j)]);
      }
      const ForwardCache cache = net.forward_cached(xb);
      const MatrixXd err = cache.output - yb;
      sum_sq += err.squaredNorm();
      // d/dy of mean squared error over the batch.
      const MatrixXd upstream = (2.0 / static_cast<double>(err.size())) * err;
      adam.step(net, net.backward(cache, upstream));
    }
    report.train_mse.push_back(sum_sq / static_cast<double>(n_train * y_train.rows()));
    report.validation_mse.push_back(n_val > 0 ? mse(net, x_val, y_val) : 0.0);
  }
  return report;
}

}  // namespace rrmx::nn
