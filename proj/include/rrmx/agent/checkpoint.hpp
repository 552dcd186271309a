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
#include "rrmx/nn/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace rrmx::agent {

/// A checkpoint directory holds the four networks and checkpoint.txt with
/// the multiplier, hyperparameters and provenance stamp. Optimiser moments
/// are not stored; checkpoints are for evaluation, not for resuming.
struct Checkpoint {
  DdpgAgent agent;
  double lambda = 0.0;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string git;
};

namespace detail {

inline std::string join_widths(const std::vector<Eigen::Index>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s;
}

inline std::vector<Eigen::Index> split_widths(const std::string& s) {
  std::vector<Eigen::Index> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<Eigen::Index>(parse_double(item)));
  return out;
}

}  // namespace detail

inline void save_checkpoint(const std::filesystem::path& dir, const DdpgAgent& agent,
                            double lambda, const std::string& config_hash, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  nn::save(agent.actor(), dir / "actor.net");
  nn::save(agent.critic(), dir / "critic.net");
  nn::save(agent.actor_target(), dir / "actor_target.net");
  nn::save(agent.critic_target(), dir / "critic_target.net");
  const auto& o = agent.options();
  std::ofstream os(dir / "checkpoint.txt");
  if (!os) throw Error("cannot write " + (dir / "checkpoint.txt").string());
  os << "format = rrmx-checkpoint 1\n"
     << "config_hash = " << config_hash << '\n'
     << "seed = " << seed << '\n'
     << "git = " << git_describe() << '\n'
     << "lambda = " << format_double(lambda) << '\n'
     << "n = " << o.n << '\n'
     << "action_bound = " << format_double(o.action_bound) << '\n'
     << "actor_hidden = " << detail::join_widths(o.actor_hidden) << '\n'
     << "critic_hidden = " << detail::join_widths(o.critic_hidden) << '\n'
     << "actor_lr = " << format_double(o.actor_lr) << '\n'
     << "critic_lr = " << format_double(o.critic_lr) << '\n'
     << "discount = " << format_double(o.discount) << '\n'
     << "rho = " << format_double(o.rho) << '\n'
     << "input_gain = " << format_double(o.input_gain) << '\n'
     << "reward_scale = " << format_double(o.reward_scale) << '\n';
}

inline Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream is(dir / "checkpoint.txt");
  if (!is) throw ParseError("no checkpoint.txt in " + dir.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ParseError("checkpoint.txt: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  auto get = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw ParseError("checkpoint.txt: missing " + k);
    return it->second;
  };
  if (get("format") != "rrmx-checkpoint 1") throw ParseError("checkpoint.txt: unknown format");
  DdpgOptions o;
  o.n = static_cast<int>(parse_double(get("n")));
  o.action_bound = parse_double(get("action_bound"));
  o.actor_hidden = detail::split_widths(get("actor_hidden"));
  o.critic_hidden = detail::split_widths(get("critic_hidden"));
  o.actor_lr = parse_double(get("actor_lr"));
  o.critic_lr = parse_double(get("critic_lr"));
  o.discount = parse_double(get("discount"));
  o.rho = parse_double(get("rho"));
  o.input_gain = parse_double(get("input_gain"));
  o.reward_scale = parse_double(get("reward_scale"));
  const auto d = o.state_dim();
  Checkpoint c{DdpgAgent(o, nn::load_expecting(dir / "actor.net", d, o.n),
                         nn::load_expecting(dir / "critic.net", d + o.n, 1),
                         nn::load_expecting(dir / "actor_target.net", d, o.n),
                         nn::load_expecting(dir / "critic_target.net", d + o.n, 1)),
               parse_double(get("lambda")), get("config_hash"),
               static_cast<std::uint64_t>(std::stoull(get("seed"))), get("git")};
  return c;
}

}  // namespace rrmx::agent
