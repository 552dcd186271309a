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

#include "rrmx/agent/checkpoint.hpp"
#include "rrmx/app/config.hpp"
#include "rrmx/eval/report.hpp"
#include "rrmx/nn/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace rrmx::app {

namespace fs = std::filesystem;

/// Flags shared by every subcommand; unset optionals mean "not given".
struct CliFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string model;
  std::string costnet;
  std::string dataset;
  std::string method = "dl-lime";
  std::optional<std::int64_t> samples;
  std::optional<std::int64_t> checkpoint_interval;
  std::optional<std::int64_t> slots;
  std::optional<std::int64_t> anchor;
};

/// Raised for operator mistakes that are not parse errors (exit 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

namespace cli_detail {

inline std::ofstream open_file(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  return os;
}

inline void write_echo(const fs::path& p, const ExperimentConfig& c) {
  auto os = open_file(p);
  os << "# rrmx config_hash=" << config_hash(c) << " seed=" << c.seed << " git=" << git_describe()
     << '\n';
  echo_config(os, c);
}

inline eval::Stamp stamp(const ExperimentConfig& c, std::uint64_t seed) {
  return {config_hash(c), seed, git_describe()};
}

inline std::string require(const std::string& v, const char* flag, const char* hint) {
  if (v.empty()) throw UsageError(std::string(flag) + " is required; " + hint);
  return v;
}

inline explain::CostNet load_costnet(const fs::path& dir, int n) {
  return explain::CostNet(nn::load_expecting(dir / "costnet.net", 2 * n + 1, n));
}

inline eval::Dataset load_dataset(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw Error("cannot open dataset " + p.string());
  return eval::read_dataset_csv(is);
}

inline agent::Checkpoint load_model(const std::string& dir, const ExperimentConfig& c) {
  auto ck = agent::load_checkpoint(dir);
  if (ck.agent.options().n != c.N)
    throw UsageError("model in " + dir + " has N = " + std::to_string(ck.agent.options().n) +
                     " but the config has N = " + std::to_string(c.N));
  return ck;
}

inline explain::TrainedCostNet fit_costnet(const eval::Dataset& d, const ExperimentConfig& c,
                                           std::ostream& log) {
  log << "training cost network on " << d.size() << " states\n";
  return explain::train_costnet(d.states, c.N, costnet_options(c));
}

inline void write_costnet(const fs::path& dir, const explain::TrainedCostNet& t,
                          const ExperimentConfig& c) {
  fs::create_directories(dir);
  nn::save(t.model.net(), dir / "costnet.net");
  auto os = open_file(dir / "costnet.txt");
  const auto& r = t.report;
  eval::write_stamp(os, stamp(c, c.seed));
  os << "train_count = " << r.train_count << '\n'
     << "validation_count = " << r.validation_count << '\n'
     << "validation_mse = " << format_double(r.final_validation_mse) << '\n'
     << "validation_target_var = " << format_double(r.validation_target_var) << '\n'
     << "pearson_cost_range = " << format_double(r.pearson_cost_range) << '\n';
  for (std::size_t e = 0; e < r.train_mse.size(); ++e)
    os << "epoch " << e + 1 << " = " << format_double(r.train_mse[e]) << ' '
       << format_double(e < r.validation_mse.size() ? r.validation_mse[e] : 0.0) << '\n';
}

// --- subcommands --------------------------------------------------------------

inline int cmd_train(ExperimentConfig c, const CliFlags& f, std::ostream& log) {
  if (f.seed) c.seed = *f.seed;
  if (f.slots) c.slots = *f.slots;
  validate(c);
  const fs::path out = f.out.empty() ? "model" : f.out;
  const auto opts = train_options(c);
  const auto every = std::max<std::int64_t>(1, c.slots / 20);
  auto res = agent::train(env_config(c), ddpg_options(c), opts,
                          [&](std::int64_t t, const agent::DdpgAgent&, double lambda) {
                            if (t % every == 0)
                              log << "slot " << t << "/" << c.slots << " lambda "
                                  << format_double(lambda) << '\n';
                          });
  agent::save_checkpoint(out, res.agent, res.final_lambda, config_hash(c), c.seed);
  {
    auto os = open_file(out / "trace.csv");
    eval::write_stamp(os, stamp(c, c.seed));
    agent::write_trace_csv(os, res.trace);
  }
  write_echo(out / "config.cfg", c);
  log << "wrote " << out.string() << '\n';
  return 0;
}

inline int cmd_collect(ExperimentConfig c, const CliFlags& f, std::ostream& log) {
  if (f.seed) c.collect_seed = *f.seed;
  if (f.slots) c.collect_slots = *f.slots;
  validate(c);
  const auto ck = load_model(require(f.model, "--model", "pass a directory written by `train`"), c);
  const fs::path out = f.out.empty() ? "dataset.csv" : f.out;
  const auto d = eval::collect_dataset(ck.agent.policy(), rollout_setup(c, ck.lambda),
                                       c.collect_slots, c.collect_seed);
  auto os = open_file(out);
  eval::write_dataset_csv(os, d, stamp(c, c.collect_seed));
  write_echo(fs::path(out.string() + ".cfg"), c);
  log << "wrote " << d.size() << " rows to " << out.string() << '\n';
  return 0;
}

inline int cmd_train_costnet(ExperimentConfig c, const CliFlags& f, std::ostream& log) {
  if (f.seed) c.seed = *f.seed;
  validate(c);
  const auto d = load_dataset(require(f.dataset, "--dataset", "pass a CSV written by `collect`"));
  if (d.n != c.N) throw UsageError("dataset N differs from config N");
  const fs::path out = f.out.empty() ? "costnet" : f.out;
  const auto t = fit_costnet(d, c, log);
  write_costnet(out, t, c);
  write_echo(out / "config.cfg", c);
  log << "validation mse " << format_double(t.report.final_validation_mse) << ", pearson "
      << format_double(t.report.pearson_cost_range) << '\n';
  return 0;
}

inline int cmd_explain(ExperimentConfig c, const CliFlags& f, std::ostream& log) {
  if (f.seed) c.eval_seed = *f.seed;
  if (f.samples) c.lime_samples = *f.samples;
  validate(c);
  const auto method = explain::method_from_string(f.method);
  const auto ck = load_model(require(f.model, "--model", "pass a directory written by `train`"), c);
  const auto d = load_dataset(require(f.dataset, "--dataset",
                                      "anchors and moments come from a `collect` dataset"));
  const Eigen::Index j = f.anchor ? *f.anchor : d.size() - 1;
  if (j < 0 || j >= d.size()) throw UsageError("--anchor must index a dataset row");
  std::optional<explain::CostNet> net;
  if (method == explain::Method::kDlLime)
    net = load_costnet(require(f.costnet, "--costnet", "dl-lime needs `train-costnet` output"), c.N);
  RandomStream rng(c.eval_seed, 0x4000000ull + static_cast<std::uint64_t>(j));
  auto cfg = explain_config(c);
  cfg.method = method;
  const auto e = explain::explain(ck.agent.policy(), VectorXd(d.states.col(j)), cfg,
                                  explain::empirical_moments(d.states), net ? &*net : nullptr, rng);
  const fs::path out = f.out.empty() ? "explanation.txt" : f.out;
  auto os = open_file(out);
  eval::write_stamp(os, stamp(c, c.eval_seed));
  os << "anchor_row = " << j << '\n';
  explain::write_explanation(os, e);
  log << "wrote " << out.string() << '\n';
  return 0;
}

inline int cmd_evaluate(ExperimentConfig c, const CliFlags& f, std::ostream& log) {
  if (f.seed) c.eval_seed = *f.seed;
  if (f.slots) c.eval_slots = *f.slots;
  if (f.samples) c.lime_samples = *f.samples;
  if (f.checkpoint_interval) c.checkpoint_interval = *f.checkpoint_interval;
  validate(c);
  const auto ck = load_model(
      require(f.model, "--model", "train a policy first with `rrmx train --out DIR` and pass DIR"),
      c);
  const auto policy = ck.agent.policy();
  const auto setup = rollout_setup(c, ck.lambda);
  eval::Dataset d;
  if (!f.dataset.empty()) {
    d = load_dataset(f.dataset);
  } else {
    log << "no --dataset; collecting " << c.collect_slots << " slots\n";
    d = eval::collect_dataset(policy, setup, c.collect_slots, c.collect_seed);
  }
  explain::CostNet net;
  if (!f.costnet.empty())
    net = load_costnet(f.costnet, c.N);
  else
    net = fit_costnet(d, c, log).model;
  const auto kit = eval::make_kit(d, net, explain_config(c));

  eval::RolloutOptions ro;
  ro.slots = c.eval_slots;
  ro.seed = c.eval_seed;
  ro.checkpoint_interval = c.checkpoint_interval;
  ro.refit_interval = c.refit_interval;
  ro.action_bound = c.action_bound;
  log << "rollouts: " << ro.slots << " slots, refit every " << ro.effective_refit() << '\n';
  const auto r = eval::crn_rollouts(policy, setup, kit, ro);

  const auto count = std::min<Eigen::Index>(c.tradeoff_states, d.size());
  MatrixXd states(d.states.rows(), count);
  for (Eigen::Index j = 0; j < count; ++j) states.col(j) = d.states.col(j * d.size() / count);
  log << "tradeoff sweep over " << count << " states\n";
  const auto trade = eval::tradeoff_sweep(policy, states, kit, c.tradeoff_samples,
                                          explain::Method::kDlLime, c.eval_seed);
  const auto scatter = eval::cost_range_scatter(d, c.eta);
  const fs::path out = f.out.empty() ? "evaluation" : f.out;
  eval::emit_report(out, {c.N, &r, &scatter, &trade}, stamp(c, c.eval_seed));
  write_echo(out / "config.cfg", c);
  log << "wrote " << out.string() << '\n';
  return 0;
}

inline int cmd_report(ExperimentConfig c, const CliFlags& f, std::ostream& log) {
  if (f.seed) c.eval_seed = *f.seed;
  validate(c);
  const fs::path dir = require(f.out, "--out", "pass the directory written by `evaluate`");
  std::ifstream mi(dir / "metrics.csv"), ui(dir / "utility.csv");
  if (!mi || !ui) throw UsageError(dir.string() + " has no metrics.csv/utility.csv; run `evaluate`");
  const auto recs = eval::read_metrics_csv(mi);
  const auto u = eval::read_utility_csv(ui);
  auto os = open_file(dir / "report.txt");
  eval::write_comparison(os, recs, u, c.bootstrap_resamples,
                         static_cast<std::size_t>(c.bootstrap_block), c.eval_seed,
                         stamp(c, c.eval_seed));
  log << "wrote " << (dir / "report.txt").string() << '\n';
  return 0;
}

}  // namespace cli_detail

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 runtime or usage failure, 2 command-line parse failure.
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cerr) {
  CLI::App app{"rrmx: radar resource management with explainable DRL"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  CliFlags f;
  std::uint64_t seed = 0;
  std::int64_t samples = 0, interval = 0, slots = 0, anchor = 0;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", f.config, "Config file (INI); RRMX_<KEY> env vars override");
    s->add_option("--seed", seed, "Seed for this stage");
    s->add_option("--out", f.out, "Output path");
  };
  auto* train = app.add_subcommand("train", "Train the constrained DDPG allocator");
  common(train);
  train->add_option("--slots", slots, "Training slots");
  auto* collect = app.add_subcommand("collect", "Greedy rollout recording a state dataset");
  common(collect);
  collect->add_option("--model", f.model, "Checkpoint directory");
  collect->add_option("--slots", slots, "Slots to record");
  auto* tcn = app.add_subcommand("train-costnet", "Fit the cost network on a dataset");
  common(tcn);
  tcn->add_option("--dataset", f.dataset, "Dataset CSV");
  auto* expl = app.add_subcommand("explain", "Explain one decision");
  common(expl);
  expl->add_option("--model", f.model, "Checkpoint directory");
  expl->add_option("--costnet", f.costnet, "Cost network directory (dl-lime)");
  expl->add_option("--dataset", f.dataset, "Dataset CSV (moments and anchor)");
  expl->add_option("--method", f.method, "lime or dl-lime")
      ->check(CLI::IsMember({"lime", "dl-lime"}));
  expl->add_option("--samples", samples, "Perturbation samples");
  expl->add_option("--anchor", anchor, "Dataset row to explain (default: last)");
  auto* evaluate = app.add_subcommand("evaluate", "Fidelity, CRN rollouts, tradeoff sweep");
  common(evaluate);
  evaluate->add_option("--model", f.model, "Checkpoint directory");
  evaluate->add_option("--costnet", f.costnet, "Cost network directory (trained if absent)");
  evaluate->add_option("--dataset", f.dataset, "Dataset CSV (collected if absent)");
  evaluate->add_option("--samples", samples, "Perturbation samples");
  evaluate->add_option("--checkpoint-interval", interval, "Slots between checkpoints");
  evaluate->add_option("--slots", slots, "Rollout slots");
  auto* report = app.add_subcommand("report", "Summary with bootstrap intervals");
  common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, log, log);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, log, log);
  } catch (const CLI::ParseError& e) {
    log << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  auto* sub = app.get_subcommands().front();
  auto given = [&](const char* name) {
    auto* o = sub->get_option_no_throw(name);
    return o && o->count() > 0;
  };
  if (given("--seed")) f.seed = seed;
  if (given("--samples")) f.samples = samples;
  if (given("--checkpoint-interval")) f.checkpoint_interval = interval;
  if (given("--slots")) f.slots = slots;
  if (given("--anchor")) f.anchor = anchor;

  try {
    const auto cfg = load_config(f.config);
    const std::string name = sub->get_name();
    if (name == "train") return cli_detail::cmd_train(cfg, f, log);
    if (name == "collect") return cli_detail::cmd_collect(cfg, f, log);
    if (name == "train-costnet") return cli_detail::cmd_train_costnet(cfg, f, log);
    if (name == "explain") return cli_detail::cmd_explain(cfg, f, log);
    if (name == "evaluate") return cli_detail::cmd_evaluate(cfg, f, log);
    return cli_detail::cmd_report(cfg, f, log);
  } catch (const std::exception& e) {
    log << sub->get_name() << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rrmx::app
