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

#include "rrmx/nn/dense_net.hpp"

#include <cmath>
#include <vector>

namespace rrmx::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam. Moment buffers mirror the network's layer shapes.
class Adam {
 public:
  Adam() = default;
  Adam(const DenseNet& net, AdamOptions opts) : opts_(opts) {
    for (const auto& l : net.layers()) {
      m_w_.push_back(MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      v_w_.push_back(MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      m_b_.push_back(VectorXd::Zero(l.bias.size()));
      v_b_.push_back(VectorXd::Zero(l.bias.size()));
    }
  }

  const AdamOptions& options() const { return opts_; }
  long steps() const { return t_; }

  /// Descends along `grads` (gradients of the loss to minimise).
  void step(DenseNet& net, const Gradients& grads) {
    auto& layers = net.layers();
    if (grads.weight.size() != layers.size() || m_w_.size() != layers.size())
      throw ContractViolation("Adam::step: gradient shape mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (grads.weight[i].rows() != layers[i].weight.rows() ||
          grads.weight[i].cols() != layers[i].weight.cols() ||
          grads.bias[i].size() != layers[i].bias.size())
        throw ContractViolation("Adam::step: gradient shape mismatch");
      update(layers[i].weight, grads.weight[i], m_w_[i], v_w_[i], bc1, bc2);
      update(layers[i].bias, grads.bias[i], m_b_[i], v_b_[i], bc1, bc2);
    }
  }

 private:
  template <typename P, typename G, typename M>
  void update(P& param, const G& grad, M& m, M& v, double bc1, double bc2) const {
    m = opts_.beta1 * m + (1.0 - opts_.beta1) * grad;
    v = opts_.beta2 * v + (1.0 - opts_.beta2) * grad.cwiseProduct(grad);
    const double lr = opts_.learning_rate;
    const double eps = opts_.epsilon;
    param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  }

  AdamOptions opts_{};
  std::vector<MatrixXd> m_w_, v_w_;
  std::vector<VectorXd> m_b_, v_b_;
  long t_ = 0;
};

}  // namespace rrmx::nn
