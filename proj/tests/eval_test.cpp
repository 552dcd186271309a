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

#include "rrmx/eval/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace rrmx::eval {
namespace {

// --- mae --------------------------------------------------------------------

TEST(Mae, Examples) {
  VectorXd a(5), b(5);
  a << 1, 2, 3, 4, 5;
  b << 2, 1, 3, 4, 5;
  EXPECT_EQ(mae(a, a), 0.0);
  EXPECT_DOUBLE_EQ(mae(a, b), 0.4);
  EXPECT_THROW(mae(a, VectorXd::Zero(4)), ContractViolation);
}

TEST(Mae, SymmetricAndTriangle) {
  RandomStream rng(1, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    VectorXd x(5), y(5), z(5);
    for (int i = 0; i < 5; ++i) {
      x(i) = rng.uniform(0, 2.5);
      y(i) = rng.uniform(0, 2.5);
      z(i) = rng.uniform(0, 2.5);
    }
    EXPECT_EQ(mae(x, y), mae(y, x));
    EXPECT_LE(mae(x, z), mae(x, y) + mae(y, z) + 1e-15);
  }
}

// --- peak performance -------------------------------------------------------

UtilityTraces random_traces(std::size_t T, RandomStream& rng, bool ties) {
  UtilityTraces u;
  for (std::size_t t = 0; t < T; ++t) {
    for (auto& tr : u) tr.push_back(std::round(rng.uniform(0, ties ? 3 : 1e6)));
  }
  return u;
}

TEST(Peak, FractionsSumToExactlyOne) {
  RandomStream rng(2, 2);
  for (std::size_t T = 1; T < 300; ++T) {
    const auto p = peak_performance(random_traces(T, rng, T % 2 == 0));
    EXPECT_EQ(p.fractions[0] + p.fractions[1] + p.fractions[2], 1.0) << T;
    EXPECT_EQ(p.counts[0] + p.counts[1] + p.counts[2], static_cast<std::int64_t>(T));
    EXPECT_NEAR(p.fractions[2], static_cast<double>(p.counts[2]) / static_cast<double>(T), 1e-15);
  }
}

TEST(Peak, DominatingPolicyTakesEverything) {
  UtilityTraces u{std::vector<double>(50, 1.0), std::vector<double>(50, 3.0),
                  std::vector<double>(50, 2.0)};
  const auto p = peak_performance(u);
  EXPECT_EQ(p.fractions[1], 1.0);
  EXPECT_EQ(p.fractions[0], 0.0);
  EXPECT_EQ(p.fractions[2], 0.0);
}

TEST(Peak, MatchesPerSlotBruteForce) {
  RandomStream rng(3, 3);
  const auto u = random_traces(100, rng, true);
  std::array<std::int64_t, 3> expect{0, 0, 0};
  for (std::size_t t = 0; t < 100; ++t) {
    const double a = u[0][t], b = u[1][t], c = u[2][t];
    if (a >= b && a >= c)
      ++expect[0];
    else if (b >= c)
      ++expect[1];
    else
      ++expect[2];
  }
  EXPECT_EQ(peak_performance(u).counts, expect);
}

TEST(Peak, LengthMismatchRejected) {
  UtilityTraces u{std::vector<double>(3), std::vector<double>(3), std::vector<double>(2)};
  EXPECT_THROW(peak_performance(u), ContractViolation);
}

// --- bootstrap --------------------------------------------------------------

TEST(Bootstrap, ConstantDataCollapses) {
  const std::vector<double> d(40, 0.25);
  const auto i = paired_bootstrap(d, 500, 0.95, 1);
  EXPECT_EQ(i.lo, 0.25);
  EXPECT_EQ(i.hi, 0.25);
  const auto j = block_bootstrap(d, 7, 500, 0.95, 1);
  EXPECT_EQ(j.lo, 0.25);
  EXPECT_EQ(j.hi, 0.25);
}

TEST(Bootstrap, IntervalBracketsMeanAndIsSeeded) {
  RandomStream rng(4, 4);
  std::vector<double> d;
  for (int k = 0; k < 200; ++k) d.push_back(1.0 + rng.normal());
  const auto a = paired_bootstrap(d, 2000, 0.95, 9);
  const auto b = paired_bootstrap(d, 2000, 0.95, 9);
  EXPECT_EQ(a.lo, b.lo);
  EXPECT_EQ(a.hi, b.hi);
  EXPECT_LT(a.lo, a.estimate);
  EXPECT_GT(a.hi, a.estimate);
  EXPECT_TRUE(a.excludes_zero());
  // Standard error is about 1/sqrt(200); the 95% half-width about 0.139.
  EXPECT_NEAR(0.5 * (a.hi - a.lo), 1.96 / std::sqrt(200.0), 0.03);
}

TEST(Bootstrap, BlocksWidenIntervalForCorrelatedSeries) {
  RandomStream rng(5, 5);
  std::vector<double> x;
  double v = 0.0;
  for (int k = 0; k < 2000; ++k) {
    v = 0.95 * v + rng.normal();
    x.push_back(v);
  }
  const auto iid = block_bootstrap(x, 1, 1000, 0.95, 3);
  const auto blk = block_bootstrap(x, 50, 1000, 0.95, 3);
  EXPECT_GT(blk.hi - blk.lo, 2.0 * (iid.hi - iid.lo));
}

// --- fixtures ---------------------------------------------------------------

RolloutSetup desk_setup() {
  RolloutSetup s;
  s.env.join_interval = 10;
  s.env.join_prob = 0.3;
  s.env.initial_targets = 3;
  s.dual = agent::DualVariable{0.0, 15000.0, 0.9};
  return s;
}

agent::ActorPolicy small_policy() {
  agent::DdpgOptions o;
  o.actor_hidden = {16};
  o.critic_hidden = {16};
  return agent::DdpgAgent(o, 3).policy();
}

struct Fixture {
  agent::ActorPolicy policy = small_policy();
  RolloutSetup setup = desk_setup();
  Dataset data;
  ExplainerKit kit;

  Fixture() {
    data = collect_dataset(policy, setup, 1200, 11);
    explain::CostNetOptions co;
    co.epochs = 2;
    co.hidden = {16};
    explain::ExplainConfig ec;
    ec.samples = 200;
    kit = make_kit(data, explain::train_costnet(data.states, 5, co).model, ec);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

// --- dataset ----------------------------------------------------------------

TEST(Dataset, RowCountAndDeterminism) {
  const auto& f = fixture();
  EXPECT_EQ(f.data.size(), 1200);
  const auto again = collect_dataset(f.policy, f.setup, 1200, 11);
  EXPECT_EQ(again.states, f.data.states);
  EXPECT_EQ(again.actions, f.data.actions);
  EXPECT_EQ(again.utility, f.data.utility);
}

TEST(Dataset, CsvRoundTripIsExact) {
  const auto& f = fixture();
  std::stringstream ss;
  write_dataset_csv(ss, f.data, {"abc", 11});
  const auto text = ss.str();
  EXPECT_EQ(text.rfind("# rrmx config_hash=abc seed=11 git=", 0), 0u);
  std::istringstream first(text.substr(text.find('\n') + 1));
  std::string header;
  std::getline(first, header);
  EXPECT_EQ(split_csv(header).size(), 1u + 16 + 5 + 5 + 1);
  std::istringstream in(text);
  const auto back = read_dataset_csv(in);
  EXPECT_EQ(back.n, 5);
  EXPECT_EQ(back.slot, f.data.slot);
  EXPECT_EQ(back.states, f.data.states);
  EXPECT_EQ(back.actions, f.data.actions);
  EXPECT_EQ(back.costs, f.data.costs);
  EXPECT_EQ(back.utility, f.data.utility);
}

TEST(Dataset, MalformedCsvRejected) {
  std::istringstream bad_header("slot,x\n1,2\n");
  EXPECT_THROW(read_dataset_csv(bad_header), ParseError);
  std::stringstream ss;
  ss << "slot";
  for (int i = 0; i < 4; ++i) ss << ",s_" << i;
  ss << ",a_0,c_0,utility\n1,2,3\n";
  EXPECT_THROW(read_dataset_csv(ss), ParseError);
}

TEST(Dataset, CostGrowsWithRange) {
  const auto pts = cost_range_scatter(fixture().data, 1e7);
  ASSERT_GT(pts.size(), 500u);
  EXPECT_GT(scatter_pearson(pts), 0.0);
  for (const auto& p : pts) EXPECT_GT(p.distance, 0.0);
}

// --- fidelity and rollouts --------------------------------------------------

TEST(Fidelity, CheckpointCountAndPairedAnchors) {
  const auto& f = fixture();
  const auto recs = checkpoint_fidelity(f.policy, f.setup, f.kit, {500, 50, 11});
  ASSERT_EQ(recs.size(), 10u);
  for (const auto& r : recs) {
    EXPECT_EQ((r.slot + 1) % 50, 0);
    // Greedy rollout with the same seed visits the dataset's states.
    EXPECT_EQ(r.anchor, f.data.states.col(r.slot));
    EXPECT_EQ(r.utility, f.data.utility[static_cast<std::size_t>(r.slot)]);
    EXPECT_GE(r.mae_lime, 0.0);
    EXPECT_GE(r.mae_dl_lime, 0.0);
    EXPECT_GT(r.runtime_lime, 0.0);
    EXPECT_GT(r.runtime_dl_lime, 0.0);
    EXPECT_GT(r.runtime_ddpg, 0.0);
  }
  EXPECT_THROW(checkpoint_fidelity(f.policy, f.setup, f.kit, {10, 0, 1}), ContractViolation);
}

TEST(Fidelity, RepeatableApartFromRuntime) {
  const auto& f = fixture();
  const auto a = checkpoint_fidelity(f.policy, f.setup, f.kit, {300, 100, 5});
  const auto b = checkpoint_fidelity(f.policy, f.setup, f.kit, {300, 100, 5});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].mae_lime, b[k].mae_lime);
    EXPECT_EQ(a[k].mae_dl_lime, b[k].mae_dl_lime);
    EXPECT_EQ(a[k].weight_dl_lime, b[k].weight_dl_lime);
  }
}

TEST(Crn, ReplicasWithEqualActionsAreIdentical) {
  const auto setup = desk_setup();
  std::vector<radar::RadarEnvironment> envs(3, radar::RadarEnvironment(setup.env, 21));
  RandomStream rng(6, 6);
  for (int t = 0; t < 300; ++t) {
    VectorXd a(5);
    for (int i = 0; i < 5; ++i) a(i) = rng.uniform(0, 0.5);
    const auto o0 = envs[0].step(a, 0.0);
    const auto o1 = envs[1].step(a, 0.0);
    const auto o2 = envs[2].step(a, 0.0);
    ASSERT_EQ(o0.costs, o1.costs);
    ASSERT_EQ(o0.costs, o2.costs);
    ASSERT_EQ(o0.utility, o2.utility);
  }
}

TEST(Crn, DdpgReplicaMatchesStandaloneRuns) {
  const auto& f = fixture();
  RolloutOptions o;
  o.slots = 200;
  o.seed = 11;
  o.checkpoint_interval = 50;
  o.refit_interval = 10;
  const auto r = crn_rollouts(f.policy, f.setup, f.kit, o);
  const auto fid = checkpoint_fidelity(f.policy, f.setup, f.kit, {200, 50, 11});
  ASSERT_EQ(r.checkpoints.size(), fid.size());
  for (std::size_t k = 0; k < fid.size(); ++k) {
    EXPECT_EQ(r.checkpoints[k].mae_lime, fid[k].mae_lime);
    EXPECT_EQ(r.checkpoints[k].mae_dl_lime, fid[k].mae_dl_lime);
    EXPECT_EQ(r.checkpoints[k].utility, fid[k].utility);
  }
  for (std::size_t t = 0; t < 200; ++t) EXPECT_EQ(r.utility[0][t], f.data.utility[t]);
  for (std::size_t m = 1; m < 3; ++m)
    for (std::size_t t = 0; t < 200; ++t) {
      if (t % 10 == 0)
        EXPECT_GT(r.fit_seconds[m][t], 0.0);
      else
        EXPECT_EQ(r.fit_seconds[m][t], 0.0);
      EXPECT_GE(r.lambda[m][t], 0.0);
      EXPECT_GE(r.dwell[m][t].minCoeff(), 0.0);
      EXPECT_LE(r.dwell[m][t].maxCoeff(), 2.5);
    }
  EXPECT_EQ(r.distances.size(), 200u);
}

TEST(Crn, RefitDefaultFollowsRunLength) {
  RolloutOptions o;
  o.slots = 5000;
  EXPECT_EQ(o.effective_refit(), 1);
  o.slots = 5001;
  o.checkpoint_interval = 250;
  EXPECT_EQ(o.effective_refit(), 250);
  o.refit_interval = 3;
  EXPECT_EQ(o.effective_refit(), 3);
}

TEST(Tradeoff, RowsAndRuntimeGrowWithK) {
  const auto& f = fixture();
  const MatrixXd states = f.data.states.middleCols(600, 20);
  const auto t = tradeoff_sweep(f.policy, states, f.kit, {50, 500, 5000}, explain::Method::kDlLime, 1);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_LT(t.rows[0].mean_runtime, t.rows[1].mean_runtime);
  EXPECT_LT(t.rows[1].mean_runtime, t.rows[2].mean_runtime);
  EXPECT_EQ(t.mae[0].size(), 20u);
  EXPECT_THROW(tradeoff_sweep(f.policy, states, f.kit, {50}, explain::Method::kLime, 1),
               ContractViolation);
}

// --- report -----------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (next_csv_line(is, line)) rows.push_back(split_csv(line));
  return rows;
}

TEST(Report, SchemasAndByteIdenticalReemission) {
  const auto& f = fixture();
  RolloutOptions o;
  o.slots = 120;
  o.seed = 11;
  o.checkpoint_interval = 40;
  o.refit_interval = 20;
  const auto r = crn_rollouts(f.policy, f.setup, f.kit, o);
  const auto scatter = cost_range_scatter(f.data, 1e7);
  const auto trade = tradeoff_sweep(f.policy, f.data.states.middleCols(700, 5), f.kit, {20, 200},
                                    explain::Method::kDlLime, 1);
  const ReportInputs in{5, &r, &scatter, &trade};
  const auto base = std::filesystem::path(testing::TempDir()) / "rrmx_report";
  std::filesystem::remove_all(base);
  const auto files = emit_report(base / "a", in, {"h", 11});
  emit_report(base / "b", in, {"h", 11});
  EXPECT_EQ(files.size(), 8u);
  for (const auto& p : files) {
    EXPECT_EQ(slurp(p), slurp(base / "b" / p.filename())) << p;
    EXPECT_EQ(slurp(p).rfind("# rrmx config_hash=h seed=11", 0), 0u) << p;
  }

  const auto summary = csv_rows(base / "a" / "summary.csv");
  ASSERT_EQ(summary.size(), 4u);
  EXPECT_EQ(summary[0], (std::vector<std::string>{"method", "mae", "utility", "runtime_s",
                                                  "peak_fraction"}));
  EXPECT_EQ(summary[1][0], "ddpg");
  EXPECT_EQ(summary[2][0], "lime");
  EXPECT_EQ(summary[3][0], "dl-lime");
  double peak = 0.0;
  for (int k = 1; k <= 3; ++k) {
    EXPECT_EQ(summary[static_cast<std::size_t>(k)].size(), 5u);
    peak += parse_double(summary[static_cast<std::size_t>(k)][4]);
  }
  EXPECT_EQ(peak, 1.0);

  const auto metrics = csv_rows(base / "a" / "metrics.csv");
  EXPECT_EQ(metrics[0], (std::vector<std::string>{"slot", "method", "mae", "utility", "runtime_s",
                                                  "winner"}));
  EXPECT_EQ(metrics.size(), 1u + 3 * 3);
  for (const auto& row : metrics) EXPECT_EQ(row.size(), 6u);

  const auto dwell = csv_rows(base / "a" / "fig2_dwell.csv");
  EXPECT_EQ(dwell.size(), 1u + 3 * 120);
  for (const auto& row : dwell) EXPECT_EQ(row.size(), 7u);
  const auto fig5 = csv_rows(base / "a" / "fig5_tradeoff.csv");
  EXPECT_EQ(fig5.size(), 3u);

  std::ifstream mi(base / "a" / "metrics.csv"), ui(base / "a" / "utility.csv");
  const auto recs = read_metrics_csv(mi);
  const auto u = read_utility_csv(ui);
  const auto expect = build_metrics(r);
  ASSERT_EQ(recs.size(), expect.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    EXPECT_EQ(recs[k].slot, expect[k].slot);
    EXPECT_EQ(recs[k].mae, expect[k].mae);
    EXPECT_EQ(recs[k].utility, expect[k].utility);
    EXPECT_EQ(recs[k].winner, expect[k].winner);
  }
  EXPECT_EQ(u, r.utility);
  std::ostringstream c1, c2;
  write_comparison(c1, recs, u, 200, 10, 1, {"h", 11});
  write_comparison(c2, recs, u, 200, 10, 1, {"h", 11});
  EXPECT_EQ(c1.str(), c2.str());
  EXPECT_NE(c1.str().find("[dl-lime minus lime]\nmae = "), std::string::npos);
}

TEST(Report, UnwritablePathRejected) {
  const auto base = std::filesystem::path(testing::TempDir()) / "rrmx_blocker";
  std::filesystem::remove_all(base);
  std::ofstream(base) << "file, not a directory";
  const std::vector<ScatterPoint> pts;
  EXPECT_THROW(emit_report(base / "sub", {5, nullptr, &pts, nullptr}, {}), Error);
  std::filesystem::remove(base);
}

}  // namespace
}  // namespace rrmx::eval
