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
#include "rrmx/explain/costnet.hpp"
#include "rrmx/explain/local_model.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <string>
#include <vector>

namespace rrmx::explain {

enum class Method { kLime, kDlLime };

inline std::string to_string(Method m) { return m == Method::kLime ? "lime" : "dl-lime"; }

inline Method method_from_string(const std::string& s) {
  if (s == "lime") return Method::kLime;
  if (s == "dl-lime") return Method::kDlLime;
  throw ContractViolation("unknown explanation method '" + s + "' (expected lime or dl-lime)");
}

namespace detail {

inline void check_moments(const VectorXd& s, const EmpiricalMoments& m) {
  if (m.mean.size() != s.size() || m.var.size() != s.size())
    throw ContractViolation("perturb: moments do not match state dimension");
  if ((m.var.array() < 0).any()) throw ContractViolation("perturb: negative variance");
}

}  // namespace detail

/// Independent Gaussian noise on every non-zero component. Each sample
/// consumes exactly d normals so that both perturbation schemes see the same
/// draws for the components they share.
inline MatrixXd lime_perturb(const VectorXd& s, const EmpiricalMoments& m, Eigen::Index K,
                             RandomStream& rng) {
  if (K < 1) throw ContractViolation("lime_perturb: K must be >= 1");
  detail::check_moments(s, m);
  const VectorXd sd = m.var.cwiseSqrt();
  MatrixXd out(s.size(), K);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double z = rng.normal();
      out(i, k) = s(i) == 0.0 ? 0.0 : s(i) + sd(i) * z;
    }
  return out;
}

/// Perturbs positions and lambda as lime_perturb does, then fills the cost
/// components from the cost network.
inline MatrixXd dl_lime_perturb(const VectorXd& s, const EmpiricalMoments& m,
                                const CostNet& costnet, Eigen::Index K, RandomStream& rng) {
  if (K < 1) throw ContractViolation("dl_lime_perturb: K must be >= 1");
  detail::check_moments(s, m);
  const int n = costnet.n();
  const agent::StateLayout L{n};
  if (s.size() != L.dim()) throw ContractViolation("dl_lime_perturb: cost network N does not match state");
  const VectorXd sd = m.var.cwiseSqrt();
  MatrixXd out(s.size(), K);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double z = rng.normal();
      out(i, k) = (s(i) == 0.0 || L.is_cost(i)) ? 0.0 : s(i) + sd(i) * z;
    }
  out.middleRows(2 * n, n) = costnet.predict(non_cost_part(out, n));
  return out;
}

struct FeatureWeight {
  Eigen::Index index = 0;
  double weight = 0.0;
};

/// Per action row, features ordered by |weight| (descending, ties by index).
inline std::vector<std::vector<FeatureWeight>> rank_importances(const MatrixXd& w) {
  std::vector<std::vector<FeatureWeight>> out(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index a = 0; a < w.rows(); ++a) {
    auto& row = out[static_cast<std::size_t>(a)];
    for (Eigen::Index k = 0; k < w.cols(); ++k) row.push_back({k, w(a, k)});
    std::stable_sort(row.begin(), row.end(), [](const FeatureWeight& x, const FeatureWeight& y) {
      return std::abs(x.weight) > std::abs(y.weight);
    });
  }
  return out;
}

struct ExplainConfig {
  Method method = Method::kLime;
  Eigen::Index samples = 10000;
  KernelConfig kernel{};
  double ridge_c = 1e-3;
};

struct Explanation {
  VectorXd anchor;
  Method method = Method::kLime;
  Eigen::Index samples = 0;
  LocalModel model;
  std::vector<std::vector<FeatureWeight>> ranked;
  VectorXd predicted;      // surrogate at the anchor
  VectorXd policy_action;  // black box at the anchor
  double seconds = 0.0;    // perturb + query + fit
};

/// Fits a local surrogate of `policy` around `s`. Policy is any callable
/// mapping a (3N+1) x K state batch to an N x K action batch.
template <class Policy>
Explanation explain(const Policy& policy, const VectorXd& s, const ExplainConfig& cfg,
                    const EmpiricalMoments& moments, const CostNet* costnet, RandomStream& rng) {
  if (cfg.method == Method::kDlLime && costnet == nullptr)
    throw ContractViolation("explain: dl-lime needs a cost network");
  Explanation e;
  e.anchor = s;
  e.method = cfg.method;
  e.samples = cfg.samples;
  const auto t0 = std::chrono::steady_clock::now();
  const MatrixXd xs = cfg.method == Method::kLime
                          ? lime_perturb(s, moments, cfg.samples, rng)
                          : dl_lime_perturb(s, moments, *costnet, cfg.samples, rng);
  const MatrixXd ys = policy(xs);
  const VectorXd w = similarity_weights(s, xs, cfg.kernel);
  e.model = fit_local_model(xs, ys, w, cfg.ridge_c);
  e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  e.ranked = rank_importances(e.model.weight);
  e.predicted = e.model.predict(s);
  e.policy_action = policy(MatrixXd(s)).col(0);
  return e;
}

/// Structured text; one `key = value` per line, then one block per action.
inline void write_explanation(std::ostream& os, const Explanation& e) {
  const int n = static_cast<int>(e.model.weight.rows());
  const agent::StateLayout L{n};
  os << "method = " << to_string(e.method) << '\n'
     << "samples = " << e.samples << '\n'
     << "seconds = " << format_double(e.seconds) << '\n'
     << "ridge_c = " << format_double(e.model.ridge_c) << '\n'
     << "weighted_mse = " << format_double(e.model.weighted_mse) << '\n'
     << "anchor =";
  for (Eigen::Index i = 0; i < e.anchor.size(); ++i) os << ' ' << format_double(e.anchor(i));
  os << '\n';
  for (int a = 0; a < n; ++a) {
    os << "[action " << a + 1 << "]\n"
       << "policy = " << format_double(e.policy_action(a)) << '\n'
       << "predicted = " << format_double(e.predicted(a)) << '\n'
       << "bias = " << format_double(e.model.bias(a)) << '\n';
    int rank = 1;
    for (const auto& fw : e.ranked[static_cast<std::size_t>(a)])
      os << "rank " << rank++ << " = " << L.feature_name(fw.index) << ' ' << fw.index << ' '
         << format_double(fw.weight) << '\n';
  }
}

}  // namespace rrmx::explain
