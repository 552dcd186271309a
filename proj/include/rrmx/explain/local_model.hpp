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

namespace rrmx::explain {

/// Per-component mean and population variance of a state dataset.
struct EmpiricalMoments {
  VectorXd mean;
  VectorXd var;
};

/// states: d x M, one recorded state per column. Two-pass.
inline EmpiricalMoments empirical_moments(const MatrixXd& states) {
  if (states.cols() < 2) throw ContractViolation("empirical_moments: need at least two states");
  EmpiricalMoments m;
  m.mean = states.rowwise().mean();
  m.var = (states.colwise() - m.mean).array().square().rowwise().mean().matrix();
  return m;
}

struct KernelConfig {
  double width = 2.5;

  void validate() const {
    if (!(width > 0)) throw ContractViolation("KernelConfig: width must be > 0");
  }
};

/// sqrt(exp(-D^2 / a^2)) with D the Euclidean distance from the anchor.
inline VectorXd similarity_weights(const VectorXd& anchor, const MatrixXd& samples,
                                   const KernelConfig& k) {
  k.validate();
  if (samples.rows() != anchor.size())
    throw ContractViolation("similarity_weights: dimension mismatch");
  const VectorXd d2 = (samples.colwise() - anchor).colwise().squaredNorm().transpose();
  return (-0.5 * d2.array() / (k.width * k.width)).exp().matrix();
}

/// Affine surrogate y ~ W x + b.
struct LocalModel {
  MatrixXd weight;  // N x d
  VectorXd bias;    // N
  double ridge_c = 0.0;
  double weighted_mse = 0.0;  // sum_k w_k |y_k - f(x_k)|^2 / sum_k w_k, averaged over N

  VectorXd predict(const VectorXd& x) const { return weight * x + bias; }
};

/// Weighted ridge, one output per row of `targets`, intercept not penalised.
/// Centering at the weighted means removes the intercept exactly, leaving
/// (Xc W Xc^T + cI) W^T = Xc W Yc^T.
inline LocalModel fit_local_model(const MatrixXd& samples, const MatrixXd& targets,
                                  const VectorXd& weights, double c) {
  const auto d = samples.rows();
  const auto K = samples.cols();
  if (K == 0) throw ContractViolation("fit_local_model: no samples");
  if (targets.cols() != K || weights.size() != K)
    throw ContractViolation("fit_local_model: sample counts disagree");
  if (!(c >= 0)) throw ContractViolation("fit_local_model: ridge c must be >= 0");
  if ((weights.array() < 0).any()) throw ContractViolation("fit_local_model: negative weight");
  const double wsum = weights.sum();
  if (!(wsum > 0)) throw ContractViolation("fit_local_model: weights sum to zero");

  const VectorXd xbar = samples * weights / wsum;
  const VectorXd ybar = targets * weights / wsum;
  const MatrixXd xc = samples.colwise() - xbar;
  const MatrixXd yc = targets.colwise() - ybar;
  const MatrixXd xw = xc * weights.asDiagonal();
  MatrixXd A = xw * xc.transpose();
  A.diagonal().array() += c;
  const MatrixXd rhs = xw * yc.transpose();  // d x N

  MatrixXd wt;
  if (c > 0) {
    Eigen::LDLT<MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw SingularityError("fit_local_model: LDLT failed");
    wt = ldlt.solve(rhs);
  } else {
    Eigen::FullPivLU<MatrixXd> lu(A);
    if (lu.rank() < d) throw SingularityError("fit_local_model: singular normal matrix (c = 0)");
    wt = lu.solve(rhs);
  }

  LocalModel m;
  m.weight = wt.transpose();
  m.bias = ybar - m.weight * xbar;
  m.ridge_c = c;
  const MatrixXd resid = (m.weight * samples).colwise() + m.bias - targets;
  m.weighted_mse = (resid.colwise().squaredNorm() * weights)(0) / wsum /
                   static_cast<double>(std::max<Eigen::Index>(1, targets.rows()));
  return m;
}

}  // namespace rrmx::explain
