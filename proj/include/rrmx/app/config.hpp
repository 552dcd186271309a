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

#include "rrmx/agent/ddpg.hpp"
#include "rrmx/agent/trainer.hpp"
#include "rrmx/eval/dataset.hpp"
#include "rrmx/eval/harness.hpp"
#include "rrmx/explain/costnet.hpp"
#include "rrmx/explain/lime.hpp"
#include "rrmx/radar/environment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rrmx::app {

/// Every tunable of an experiment. Defaults are the reference values; the
/// desk profile in configs/desk.cfg only changes the spawn schedule and run
/// lengths.
struct ExperimentConfig {
  // [ddpg]
  int state_dim = 16;
  double eta = 1e7;
  double action_bound = 2.5;
  double discount = 0.9;
  double lambda0 = 5000.0;
  double alpha_lambda = 15000.0;
  std::vector<Eigen::Index> actor_hidden{256, 128};
  std::vector<Eigen::Index> critic_hidden{100, 100};
  double actor_lr = 2e-4;
  double critic_lr = 2e-4;
  std::int64_t replay = 100000;
  std::int64_t batch = 64;
  double rho = 0.005;
  double noise_start = 0.5;
  double noise_end = 0.05;
  double noise_decay_fraction = 0.2;
  double input_gain = 1e3;
  double reward_scale = 1e-5;

  // [environment]
  int N = 5;
  std::int64_t slots = 50000;
  double P_f = 1e-3;
  double P_d = 0.9;
  double theta_max = 0.9;
  double join_prob = 0.03;
  int join_interval = 100;
  int initial_targets = 2;
  int max_lifetime = 3000;
  double spawn_range_min = 2000.0;
  double spawn_range_max = 15000.0;
  double speed_min = 10.0;
  double speed_max = 100.0;

  // [lime]
  double kernel_width = 2.5;
  std::int64_t lime_samples = 10000;
  double ridge_c = 1e-3;

  // [radar]
  double sigma_r0_sq = 16.0;
  double sigma_theta0_sq = 1e-6;
  double sigma_w = 16.0;
  double T0 = 2.5;
  double beta = 1e5;
  double gate = 500.0;
  double tau_min = 0.01;
  double tau_s_ref = 0.25;
  double r_0 = 10000.0;

  // [costnet]
  std::vector<Eigen::Index> costnet_hidden{128, 64};
  int costnet_epochs = 30;
  double costnet_lr = 1e-4;
  std::int64_t costnet_batch = 64;

  // [eval]
  std::int64_t collect_slots = 20000;
  std::int64_t eval_slots = 2000;
  std::int64_t checkpoint_interval = 500;
  std::int64_t refit_interval = 0;
  std::vector<Eigen::Index> tradeoff_samples{100, 1000, 10000};
  std::int64_t tradeoff_states = 50;
  int bootstrap_resamples = 2000;
  std::int64_t bootstrap_block = 50;

  // [seeds]
  std::uint64_t seed = 1;
  std::uint64_t collect_seed = 101;
  std::uint64_t eval_seed = 202;
};

namespace detail {

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

inline double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const ParseError&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

inline std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

inline std::vector<Eigen::Index> to_list(const std::string& key, const std::string& v) {
  std::vector<Eigen::Index> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' '), e = item.find_last_not_of(' ');
    out.push_back(to_int(key, b == std::string::npos ? "" : item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of integers");
  return out;
}

inline std::string from_list(const std::vector<Eigen::Index>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

#define RRMX_REAL(sec, name)                                                   \
  Field {                                                                      \
    sec, #name, [](const ExperimentConfig& c) { return format_double(c.name); }, \
        [](ExperimentConfig& c, const std::string& v) { c.name = to_double(#name, v); } \
  }
#define RRMX_INT(sec, name)                                                         \
  Field {                                                                           \
    sec, #name, [](const ExperimentConfig& c) { return std::to_string(c.name); },    \
        [](ExperimentConfig& c, const std::string& v) {                             \
          c.name = static_cast<decltype(c.name)>(to_int(#name, v));                  \
        }                                                                           \
  }
#define RRMX_LIST(sec, name)                                                     \
  Field {                                                                        \
    sec, #name, [](const ExperimentConfig& c) { return from_list(c.name); },      \
        [](ExperimentConfig& c, const std::string& v) { c.name = to_list(#name, v); } \
  }

inline const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      RRMX_INT("ddpg", state_dim), RRMX_REAL("ddpg", eta), RRMX_REAL("ddpg", action_bound),
      RRMX_REAL("ddpg", discount), RRMX_REAL("ddpg", lambda0), RRMX_REAL("ddpg", alpha_lambda),
      RRMX_LIST("ddpg", actor_hidden), RRMX_LIST("ddpg", critic_hidden),
      RRMX_REAL("ddpg", actor_lr), RRMX_REAL("ddpg", critic_lr), RRMX_INT("ddpg", replay),
      RRMX_INT("ddpg", batch), RRMX_REAL("ddpg", rho), RRMX_REAL("ddpg", noise_start),
      RRMX_REAL("ddpg", noise_end), RRMX_REAL("ddpg", noise_decay_fraction),
      RRMX_REAL("ddpg", input_gain), RRMX_REAL("ddpg", reward_scale),

      RRMX_INT("environment", N), RRMX_INT("environment", slots), RRMX_REAL("environment", P_f),
      RRMX_REAL("environment", P_d), RRMX_REAL("environment", theta_max),
      RRMX_REAL("environment", join_prob), RRMX_INT("environment", join_interval),
      RRMX_INT("environment", initial_targets), RRMX_INT("environment", max_lifetime),
      RRMX_REAL("environment", spawn_range_min), RRMX_REAL("environment", spawn_range_max),
      RRMX_REAL("environment", speed_min), RRMX_REAL("environment", speed_max),

      RRMX_REAL("lime", kernel_width), RRMX_INT("lime", lime_samples), RRMX_REAL("lime", ridge_c),

      RRMX_REAL("radar", sigma_r0_sq), RRMX_REAL("radar", sigma_theta0_sq),
      RRMX_REAL("radar", sigma_w), RRMX_REAL("radar", T0), RRMX_REAL("radar", beta),
      RRMX_REAL("radar", gate), RRMX_REAL("radar", tau_min), RRMX_REAL("radar", tau_s_ref),
      RRMX_REAL("radar", r_0),

      RRMX_LIST("costnet", costnet_hidden), RRMX_INT("costnet", costnet_epochs),
      RRMX_REAL("costnet", costnet_lr), RRMX_INT("costnet", costnet_batch),

      RRMX_INT("eval", collect_slots), RRMX_INT("eval", eval_slots),
      RRMX_INT("eval", checkpoint_interval), RRMX_INT("eval", refit_interval),
      RRMX_LIST("eval", tradeoff_samples), RRMX_INT("eval", tradeoff_states),
      RRMX_INT("eval", bootstrap_resamples), RRMX_INT("eval", bootstrap_block),

      RRMX_INT("seeds", seed), RRMX_INT("seeds", collect_seed), RRMX_INT("seeds", eval_seed),
  };
  return f;
}

#undef RRMX_REAL
#undef RRMX_INT
#undef RRMX_LIST

inline const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.key) return &f;
  return nullptr;
}

inline std::string env_name(const std::string& key) {
  std::string s = "RRMX_";
  for (char c : key) s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

/// Range rules; the error names the offending key.
inline void validate(const ExperimentConfig& c) {
  auto need = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
  };
  need(c.N >= 1, "N", "must be >= 1");
  need(c.state_dim == 3 * c.N + 1, "state_dim", "must equal 3N+1");
  need(c.eta > 0, "eta", "must be > 0");
  need(c.T0 > 0, "T0", "must be > 0");
  need(c.action_bound > 0 && c.action_bound <= c.T0, "action_bound", "must lie in (0, T0]");
  need(c.discount >= 0 && c.discount < 1, "discount", "must lie in [0, 1)");
  need(c.lambda0 >= 0, "lambda0", "must be >= 0");
  need(c.alpha_lambda >= 0, "alpha_lambda", "must be >= 0");
  need(c.actor_lr > 0, "actor_lr", "must be > 0");
  need(c.critic_lr > 0, "critic_lr", "must be > 0");
  need(c.replay >= 1, "replay", "must be >= 1");
  need(c.batch >= 1, "batch", "must be >= 1");
  need(c.rho > 0 && c.rho <= 1, "rho", "must lie in (0, 1]");
  need(c.noise_start >= 0, "noise_start", "must be >= 0");
  need(c.noise_end >= 0, "noise_end", "must be >= 0");
  need(c.noise_decay_fraction >= 0 && c.noise_decay_fraction <= 1, "noise_decay_fraction",
       "must lie in [0, 1]");
  need(c.input_gain > 0, "input_gain", "must be > 0");
  need(c.reward_scale > 0, "reward_scale", "must be > 0");
  need(c.slots >= 1, "slots", "must be >= 1");
  need(c.P_f > 0 && c.P_f < 1, "P_f", "must lie in (0, 1)");
  need(c.P_d > c.P_f && c.P_d < 1, "P_d", "must lie in (P_f, 1)");
  need(c.theta_max > 0 && c.theta_max <= 1, "theta_max", "must lie in (0, 1]");
  need(c.join_prob >= 0 && c.join_prob <= 1, "join_prob", "must lie in [0, 1]");
  need(c.join_interval >= 1, "join_interval", "must be >= 1");
  need(c.initial_targets >= 0 && c.initial_targets <= c.N, "initial_targets", "must lie in [0, N]");
  need(c.max_lifetime >= 1, "max_lifetime", "must be >= 1");
  need(c.spawn_range_min > 0, "spawn_range_min", "must be > 0");
  need(c.spawn_range_max >= c.spawn_range_min && c.spawn_range_max < radar::kSurveillanceRadius,
       "spawn_range_max", "must lie in [spawn_range_min, surveillance radius)");
  need(c.speed_min >= 0, "speed_min", "must be >= 0");
  need(c.speed_max >= c.speed_min, "speed_max", "must be >= speed_min");
  need(c.kernel_width > 0, "kernel_width", "must be > 0");
  need(c.lime_samples >= 1, "lime_samples", "must be >= 1");
  need(c.ridge_c >= 0, "ridge_c", "must be >= 0");
  need(c.sigma_r0_sq > 0, "sigma_r0_sq", "must be > 0");
  need(c.sigma_theta0_sq > 0, "sigma_theta0_sq", "must be > 0");
  need(c.sigma_w >= 0, "sigma_w", "must be >= 0");
  need(c.beta > 0, "beta", "must be > 0");
  need(c.gate > 0, "gate", "must be > 0");
  need(c.tau_min > 0, "tau_min", "must be > 0");
  need(c.tau_s_ref > 0, "tau_s_ref", "must be > 0");
  need(c.r_0 > 0, "r_0", "must be > 0");
  need(c.costnet_epochs >= 1, "costnet_epochs", "must be >= 1");
  need(c.costnet_lr > 0, "costnet_lr", "must be > 0");
  need(c.costnet_batch >= 1, "costnet_batch", "must be >= 1");
  need(c.collect_slots >= 1, "collect_slots", "must be >= 1");
  need(c.eval_slots >= 1, "eval_slots", "must be >= 1");
  need(c.checkpoint_interval >= 1, "checkpoint_interval", "must be >= 1");
  need(c.refit_interval >= 0, "refit_interval", "must be >= 0");
  need(c.tradeoff_samples.size() >= 2, "tradeoff_samples", "needs at least two values");
  for (auto k : c.tradeoff_samples) need(k >= 1, "tradeoff_samples", "values must be >= 1");
  for (auto k : c.actor_hidden) need(k >= 1, "actor_hidden", "widths must be >= 1");
  for (auto k : c.critic_hidden) need(k >= 1, "critic_hidden", "widths must be >= 1");
  for (auto k : c.costnet_hidden) need(k >= 1, "costnet_hidden", "widths must be >= 1");
  need(c.tradeoff_states >= 1, "tradeoff_states", "must be >= 1");
  need(c.bootstrap_resamples >= 1, "bootstrap_resamples", "must be >= 1");
  need(c.bootstrap_block >= 1, "bootstrap_block", "must be >= 1");
}

inline void set_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const auto* f = detail::find_field(key);
  if (!f) throw ConfigError(key, "unknown key");
  f->set(c, value);
}

inline std::string get_value(const ExperimentConfig& c, const std::string& key) {
  const auto* f = detail::find_field(key);
  if (!f) throw ConfigError(key, "unknown key");
  return f->get(c);
}

/// INI text: optional [section] headers, `key = value`, `#` or `;` comments.
/// Keys may sit at top level or in their own section; anything else is an
/// error naming the key.
inline ExperimentConfig parse_config(std::istream& is, const std::string& source = "config") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig c;
  std::map<std::string, bool> seen;
  auto apply = [&](const std::string& section, const std::string& key, const std::string& value) {
    const auto* f = detail::find_field(key);
    if (!f || (!section.empty() && section != f->section))
      throw ConfigError(section.empty() ? key : section + "." + key, "unknown key");
    if (seen[key]) throw ConfigError(key, "given more than once");
    seen[key] = true;
    f->set(c, value);
  };
  for (const auto& [name, node] : tree) {
    if (node.empty() && !node.data().empty()) {
      apply("", name, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) apply(name, key, leaf.data());
  }
  return c;
}

/// RRMX_<KEY> environment variables override file values (key upper-cased).
inline void apply_env_overrides(ExperimentConfig& c) {
  for (const auto& f : detail::fields())
    if (const char* v = std::getenv(detail::env_name(f.key).c_str())) f.set(c, v);
}

inline ExperimentConfig load_config(const std::string& path, bool env_overrides = true) {
  ExperimentConfig c;
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open config " + path);
    c = parse_config(is, path);
  }
  if (env_overrides) apply_env_overrides(c);
  validate(c);
  return c;
}

/// Fully resolved config, every key in its section. parse_config of this
/// text gives back the same config.
inline void echo_config(std::ostream& os, const ExperimentConfig& c) {
  std::string section;
  for (const auto& f : detail::fields()) {
    if (section != f.section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(c) << '\n';
  }
}

inline std::string echo_string(const ExperimentConfig& c) {
  std::ostringstream os;
  echo_config(os, c);
  return os.str();
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return echo_string(a) == echo_string(b);
}

/// 16 hex digits of FNV-1a over the echo.
inline std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(echo_string(c))));
  return buf;
}

// --- views for the library modules -------------------------------------------

inline radar::EnvConfig env_config(const ExperimentConfig& c) {
  radar::EnvConfig e;
  e.max_targets = c.N;
  e.period = c.T0;
  e.accel_variance = c.sigma_w;
  e.sensor.range_var = c.sigma_r0_sq;
  e.sensor.azimuth_var = c.sigma_theta0_sq;
  e.sensor.ref_range = c.r_0;
  e.sensor.nominal_dwell = c.theta_max * c.T0 / c.N;
  e.sensor.min_dwell = c.tau_min;
  e.scan.ref_scan_time = c.tau_s_ref;
  e.scan.ref_range = c.r_0;
  e.scan.false_alarm = c.P_f;
  e.scan.detection = c.P_d;
  e.reward.beta = c.beta;
  e.reward.theta_max = c.theta_max;
  e.reward.period = c.T0;
  e.reward.max_targets = c.N;
  e.gate = c.gate;
  e.join_prob = c.join_prob;
  e.join_interval = c.join_interval;
  e.initial_targets = c.initial_targets;
  e.max_lifetime = c.max_lifetime;
  e.spawn_range_min = c.spawn_range_min;
  e.spawn_range_max = c.spawn_range_max;
  e.speed_min = c.speed_min;
  e.speed_max = c.speed_max;
  return e;
}

inline agent::DdpgOptions ddpg_options(const ExperimentConfig& c) {
  agent::DdpgOptions o;
  o.n = c.N;
  o.action_bound = c.action_bound;
  o.actor_hidden = c.actor_hidden;
  o.critic_hidden = c.critic_hidden;
  o.actor_lr = c.actor_lr;
  o.critic_lr = c.critic_lr;
  o.discount = c.discount;
  o.rho = c.rho;
  o.input_gain = c.input_gain;
  o.reward_scale = c.reward_scale;
  return o;
}

inline agent::TrainOptions train_options(const ExperimentConfig& c) {
  agent::TrainOptions o;
  o.slots = c.slots;
  o.eta = c.eta;
  o.lambda0 = c.lambda0;
  o.alpha_lambda = c.alpha_lambda;
  o.replay_capacity = c.replay;
  o.batch = c.batch;
  o.noise_start = c.noise_start;
  o.noise_end = c.noise_end;
  o.noise_decay_fraction = c.noise_decay_fraction;
  o.seed = c.seed;
  return o;
}

inline explain::ExplainConfig explain_config(const ExperimentConfig& c) {
  explain::ExplainConfig e;
  e.samples = c.lime_samples;
  e.kernel.width = c.kernel_width;
  e.ridge_c = c.ridge_c;
  return e;
}

inline explain::CostNetOptions costnet_options(const ExperimentConfig& c) {
  explain::CostNetOptions o;
  o.hidden = c.costnet_hidden;
  o.epochs = c.costnet_epochs;
  o.learning_rate = c.costnet_lr;
  o.batch_size = c.costnet_batch;
  o.seed = c.seed;
  return o;
}

/// Rollouts of a trained policy start from the multiplier it finished with.
inline eval::RolloutSetup rollout_setup(const ExperimentConfig& c, double lambda) {
  return {env_config(c), c.eta, agent::DualVariable{lambda, c.alpha_lambda, c.theta_max}};
}

}  // namespace rrmx::app
