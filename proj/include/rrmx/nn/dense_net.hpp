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

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace rrmx::nn {

enum class Activation { kRelu, kIdentity, kSquash };

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kIdentity:
      return "identity";
    case Activation::kSquash:
      return "squash";
  }
  return "?";
}

inline Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "identity") return Activation::kIdentity;
  if (s == "squash") return Activation::kSquash;
  throw ParseError("unknown activation '" + std::string(s) + "'");
}

/// One affine layer followed by an activation. `bound` is the upper limit of
/// the squash activation, bound * logistic(z).
struct Layer {
  MatrixXd weight;  // out x in
  VectorXd bias;    // out
  Activation act = Activation::kIdentity;
  double bound = 1.0;

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
};

struct LayerSpec {
  Eigen::Index width;
  Activation act;
  double bound = 1.0;
};

/// Per-layer parameter gradients, shaped like the network.
struct Gradients {
  std::vector<MatrixXd> weight;
  std::vector<VectorXd> bias;
  MatrixXd input;  // in x batch

  void scale(double s) {
    for (auto& w : weight) w *= s;
    for (auto& b : bias) b *= s;
    input *= s;
  }
};

/// Cached activations of a batched forward pass (columns are samples).
struct ForwardCache {
  std::vector<MatrixXd> inputs;  // input to layer l
  std::vector<MatrixXd> pre;     // affine output of layer l
  MatrixXd output;
};

/// Fully connected feed-forward network. Batches are column-major: each
/// column is one sample.
class DenseNet {
 public:
  DenseNet() = default;

  /// He init for relu layers, Xavier (uniform) for identity and squash.
  DenseNet(Eigen::Index in_dim, const std::vector<LayerSpec>& specs, RandomStream& rng) {
    Eigen::Index fan_in = in_dim;
    for (const auto& spec : specs) {
      Layer l;
      l.act = spec.act;
      l.bound = spec.bound;
      l.weight.resize(spec.width, fan_in);
      l.bias = VectorXd::Zero(spec.width);
      if (spec.act == Activation::kRelu) {
        const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = sd * rng.normal();
      } else {
        const double lim = std::sqrt(6.0 / static_cast<double>(fan_in + spec.width));
        for (Eigen::Index i = 0; i < l.weight.size(); ++i)
          l.weight.data()[i] = rng.uniform(-lim, lim);
      }
      layers_.push_back(std::move(l));
      fan_in = spec.width;
    }
    validate();
  }

  explicit DenseNet(std::vector<Layer> layers) : layers_(std::move(layers)) { validate(); }

  Eigen::Index in_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
  Eigen::Index out_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  void validate() const {
    if (layers_.empty()) throw ContractViolation("DenseNet: no layers");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& l = layers_[i];
      if (l.bias.size() != l.weight.rows())
        throw ContractViolation("DenseNet: bias length does not match layer width");
      if (i > 0 && l.in_dim() != layers_[i - 1].out_dim())
        throw ContractViolation("DenseNet: layer dimensions do not chain");
      if (!l.weight.allFinite() || !l.bias.allFinite())
        throw ContractViolation("DenseNet: non-finite parameter");
    }
  }

  MatrixXd forward(const MatrixXd& x) const {
    check_input(x.rows());
    MatrixXd h = x;
    for (const auto& l : layers_) {
      MatrixXd z = l.weight * h;
      z.colwise() += l.bias;
      h = activate(l, z);
    }
    return h;
  }

  VectorXd forward(const VectorXd& x) const { return forward(MatrixXd(x)).col(0); }

  ForwardCache forward_cached(const MatrixXd& x) const {
    check_input(x.rows());
    ForwardCache cache;
    MatrixXd h = x;
    for (const auto& l : layers_) {
      cache.inputs.push_back(h);
      MatrixXd z = l.weight * h;
      z.colwise() += l.bias;
      h = activate(l, z);
      cache.pre.push_back(std::move(z));
    }
    cache.output = std::move(h);
    return cache;
  }

  /// Reverse-mode gradients of sum_j upstream(:, j) . output(:, j) with
  /// respect to every parameter and to the input batch.
  Gradients backward(const ForwardCache& cache, const MatrixXd& upstream) const {
    if (upstream.rows() != out_dim() || upstream.cols() != cache.output.cols())
      throw ContractViolation("DenseNet::backward: upstream gradient shape mismatch");
    Gradients g;
    g.weight.resize(layers_.size());
    g.bias.resize(layers_.size());
    MatrixXd delta = upstream;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      const auto& l = layers_[k];
      delta = delta.cwiseProduct(activation_slope(l, cache.pre[k]));
      g.weight[k] = delta * cache.inputs[k].transpose();
      g.bias[k] = delta.rowwise().sum();
      delta = l.weight.transpose() * delta;
    }
    g.input = std::move(delta);
    return g;
  }

  Gradients backward(const MatrixXd& x, const MatrixXd& upstream) const {
    return backward(forward_cached(x), upstream);
  }

  /// this <- rho * other + (1 - rho) * this
  void blend_toward(const DenseNet& other, double rho) {
    if (other.layers_.size() != layers_.size())
      throw ContractViolation("blend_toward: architecture mismatch");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      auto& l = layers_[i];
      const auto& o = other.layers_[i];
      if (l.weight.rows() != o.weight.rows() || l.weight.cols() != o.weight.cols())
        throw ContractViolation("blend_toward: architecture mismatch");
      l.weight = rho * o.weight + (1.0 - rho) * l.weight;
      l.bias = rho * o.bias + (1.0 - rho) * l.bias;
    }
  }

  friend bool operator==(const DenseNet& a, const DenseNet& b) {
    if (a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t i = 0; i < a.layers_.size(); ++i) {
      const auto& x = a.layers_[i];
      const auto& y = b.layers_[i];
      if (x.act != y.act || x.bound != y.bound) return false;
      if (x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols()) return false;
      if (x.weight != y.weight || x.bias != y.bias) return false;
    }
    return true;
  }

 private:
  void check_input(Eigen::Index rows) const {
    if (layers_.empty()) throw ContractViolation("DenseNet: empty network");
    if (rows != in_dim())
      throw ContractViolation("DenseNet: input has " + std::to_string(rows) +
                              " rows, expected " + std::to_string(in_dim()));
  }

  static MatrixXd activate(const Layer& l, const MatrixXd& z) {
    switch (l.act) {
      case Activation::kRelu:
        return z.cwiseMax(0.0);
      case Activation::kIdentity:
        return z;
      case Activation::kSquash:
        return z.unaryExpr([b = l.bound](double v) { return b / (1.0 + std::exp(-v)); });
    }
    return z;
  }

  static MatrixXd activation_slope(const Layer& l, const MatrixXd& z) {
    switch (l.act) {
      case Activation::kRelu:
        return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
      case Activation::kIdentity:
        return MatrixXd::Ones(z.rows(), z.cols());
      case Activation::kSquash:
        return z.unaryExpr([b = l.bound](double v) {
          const double s = 1.0 / (1.0 + std::exp(-v));
          return b * s * (1.0 - s);
        });
    }
    return MatrixXd::Ones(z.rows(), z.cols());
  }

  std::vector<Layer> layers_;
};

}  // namespace rrmx::nn
