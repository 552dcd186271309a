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

#include "rrmx/eval/harness.hpp"

#include <filesystem>
#include <fstream>
#include <limits>

namespace rrmx::eval {

/// One checkpoint of an evaluation run: paired MAE and runtime at the DDPG
/// state, executed utility of each replica at that slot, and the slot winner.
struct MetricsRecord {
  std::int64_t slot = 0;
  std::array<double, 3> mae{};
  std::array<double, 3> utility{};
  std::array<double, 3> runtime{};
  Policy winner = Policy::kDdpg;
};

inline std::vector<MetricsRecord> build_metrics(const RolloutResult& r) {
  std::vector<MetricsRecord> out;
  for (const auto& c : r.checkpoints) {
    const auto t = static_cast<std::size_t>(c.slot);
    MetricsRecord m;
    m.slot = c.slot;
    m.mae = {0.0, c.mae_lime, c.mae_dl_lime};
    m.runtime = {c.runtime_ddpg, c.runtime_lime, c.runtime_dl_lime};
    for (std::size_t k = 0; k < 3; ++k) m.utility[k] = r.utility[k].at(t);
    m.winner = winner_at(r.utility, t);
    out.push_back(m);
  }
  return out;
}

/// Per-policy means: MAE and runtime over checkpoints, utility over all
/// slots, and the peak-performance fraction.
struct SummaryRow {
  Policy policy = Policy::kDdpg;
  double mae = 0.0;
  double utility = 0.0;
  double runtime = 0.0;
  double peak = 0.0;
};

inline std::array<SummaryRow, 3> summarize(const RolloutResult& r) {
  const auto peak = peak_performance(r.utility);
  const auto recs = build_metrics(r);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::array<SummaryRow, 3> rows;
  for (std::size_t k = 0; k < 3; ++k) {
    auto& row = rows[k];
    row.policy = kPolicies[k];
    row.utility = detail::mean(r.utility[k]);
    row.peak = peak.fractions[k];
    row.mae = recs.empty() ? nan : 0.0;
    row.runtime = recs.empty() ? nan : 0.0;
    for (const auto& m : recs) {
      row.mae += m.mae[k] / static_cast<double>(recs.size());
      row.runtime += m.runtime[k] / static_cast<double>(recs.size());
    }
  }
  return rows;
}

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& recs,
                              const Stamp& stamp) {
  write_stamp(os, stamp);
  os << "slot,method,mae,utility,runtime_s,winner\n";
  for (const auto& m : recs)
    for (std::size_t k = 0; k < 3; ++k)
      os << m.slot << ',' << to_string(kPolicies[k]) << ',' << format_double(m.mae[k]) << ','
         << format_double(m.utility[k]) << ',' << format_double(m.runtime[k]) << ','
         << to_string(m.winner) << '\n';
}

inline void write_summary_csv(std::ostream& os, const std::array<SummaryRow, 3>& rows,
                              const Stamp& stamp) {
  write_stamp(os, stamp);
  os << "method,mae,utility,runtime_s,peak_fraction\n";
  for (const auto& r : rows)
    os << to_string(r.policy) << ',' << format_double(r.mae) << ',' << format_double(r.utility)
       << ',' << format_double(r.runtime) << ',' << format_double(r.peak) << '\n';
}

struct ReportInputs {
  int n = 5;
  const RolloutResult* rollout = nullptr;
  const std::vector<ScatterPoint>* scatter = nullptr;
  const TradeoffResult* tradeoff = nullptr;
};

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  return os;
}

}  // namespace detail

/// Writes whichever artifacts the inputs support; returns their paths.
inline std::vector<std::filesystem::path> emit_report(const std::filesystem::path& dir,
                                                      const ReportInputs& in,
                                                      const Stamp& stamp) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto open = [&](const char* name) {
    written.push_back(dir / name);
    auto os = detail::open_out(written.back());
    write_stamp(os, stamp);
    return os;
  };

  if (in.rollout) {
    const auto& r = *in.rollout;
    {
      written.push_back(dir / "metrics.csv");
      auto os = detail::open_out(written.back());
      write_metrics_csv(os, build_metrics(r), stamp);
    }
    {
      written.push_back(dir / "summary.csv");
      auto os = detail::open_out(written.back());
      write_summary_csv(os, summarize(r), stamp);
    }
    {
      auto os = open("utility.csv");
      os << "slot,ddpg,lime,dl-lime\n";
      for (std::size_t t = 0; t < r.utility[0].size(); ++t)
        os << t << ',' << format_double(r.utility[0][t]) << ',' << format_double(r.utility[1][t])
           << ',' << format_double(r.utility[2][t]) << '\n';
    }
    {
      auto os = open("fig2_distances.csv");
      os << "slot";
      for (int i = 0; i < in.n; ++i) os << ",d_" << i;
      os << '\n';
      for (std::size_t t = 0; t < r.distances.size(); ++t) {
        os << t;
        for (int i = 0; i < in.n; ++i) os << ',' << format_double(r.distances[t](i));
        os << '\n';
      }
    }
    {
      auto os = open("fig2_dwell.csv");
      os << "slot,method";
      for (int i = 0; i < in.n; ++i) os << ",a_" << i;
      os << '\n';
      for (std::size_t t = 0; t < r.dwell[0].size(); ++t)
        for (std::size_t k = 0; k < 3; ++k) {
          os << t << ',' << to_string(kPolicies[k]);
          for (int i = 0; i < in.n; ++i) os << ',' << format_double(r.dwell[k][t](i));
          os << '\n';
        }
    }
    {
      auto os = open("fig4_importance.csv");
      os << "slot,method,action,rank,feature,weight\n";
      const agent::StateLayout L{in.n};
      for (const auto& c : r.checkpoints)
        for (const auto* w : {&c.weight_lime, &c.weight_dl_lime}) {
          const char* name = w == &c.weight_lime ? "lime" : "dl-lime";
          const auto ranked = explain::rank_importances(*w);
          for (std::size_t a = 0; a < ranked.size(); ++a)
            for (std::size_t k = 0; k < ranked[a].size(); ++k)
              os << c.slot << ',' << name << ',' << a + 1 << ',' << k + 1 << ','
                 << L.feature_name(ranked[a][k].index) << ',' << format_double(ranked[a][k].weight)
                 << '\n';
        }
    }
  }
  if (in.scatter) {
    auto os = open("fig1_cost_distance.csv");
    os << "slot,target,distance_m,cost_m2\n";
    for (const auto& p : *in.scatter)
      os << p.slot << ',' << p.target << ',' << format_double(p.distance) << ','
         << format_double(p.cost) << '\n';
  }
  if (in.tradeoff) {
    auto os = open("fig5_tradeoff.csv");
    os << "samples,mean_mae,mean_runtime_s\n";
    for (const auto& row : in.tradeoff->rows)
      os << row.samples << ',' << format_double(row.mean_mae) << ','
         << format_double(row.mean_runtime) << '\n';
  }
  return written;
}

inline std::vector<MetricsRecord> read_metrics_csv(std::istream& is) {
  std::string line;
  if (!next_csv_line(is, line) || line != "slot,method,mae,utility,runtime_s,winner")
    throw ParseError("metrics: unexpected header");
  std::vector<MetricsRecord> out;
  std::size_t row = 0;
  while (next_csv_line(is, line)) {
    const auto c = split_csv(line);
    if (c.size() != 6) throw ParseError("metrics: row " + std::to_string(row + 1) + " malformed");
    const std::size_t k = row % 3;
    if (c[1] != to_string(kPolicies[k])) throw ParseError("metrics: methods out of order");
    if (k == 0) {
      out.emplace_back();
      out.back().slot = static_cast<std::int64_t>(parse_double(c[0]));
    }
    auto& m = out.back();
    m.mae[k] = parse_double(c[2]);
    m.utility[k] = parse_double(c[3]);
    m.runtime[k] = parse_double(c[4]);
    bool known = false;
    for (auto p : kPolicies)
      if (c[5] == to_string(p)) {
        m.winner = p;
        known = true;
      }
    if (!known) throw ParseError("metrics: unknown winner '" + c[5] + "'");
    ++row;
  }
  if (row % 3 != 0) throw ParseError("metrics: incomplete checkpoint");
  return out;
}

inline UtilityTraces read_utility_csv(std::istream& is) {
  std::string line;
  if (!next_csv_line(is, line) || line != "slot,ddpg,lime,dl-lime")
    throw ParseError("utility: unexpected header");
  UtilityTraces u;
  while (next_csv_line(is, line)) {
    const auto c = split_csv(line);
    if (c.size() != 4) throw ParseError("utility: malformed row");
    for (std::size_t k = 0; k < 3; ++k) u[k].push_back(parse_double(c[k + 1]));
  }
  return u;
}

/// Table of per-method means plus bootstrap intervals for the two headline
/// differences (DL-LIME minus LIME).
inline void write_comparison(std::ostream& os, const std::vector<MetricsRecord>& recs,
                             const UtilityTraces& u, int resamples, std::size_t block,
                             std::uint64_t seed, const Stamp& stamp) {
  if (recs.size() < 2) throw ContractViolation("report: need at least two checkpoints");
  const auto peak = peak_performance(u);
  write_stamp(os, stamp);
  os << "checkpoints = " << recs.size() << '\n' << "slots = " << u[0].size() << '\n';
  for (std::size_t k = 0; k < 3; ++k) {
    double m = 0, rt = 0;
    for (const auto& r : recs) {
      m += r.mae[k];
      rt += r.runtime[k];
    }
    const auto n = static_cast<double>(recs.size());
    os << '[' << to_string(kPolicies[k]) << "]\n"
       << "mae = " << format_double(m / n) << '\n'
       << "utility = " << format_double(detail::mean(u[k])) << '\n'
       << "runtime_s = " << format_double(rt / n) << '\n'
       << "peak_fraction = " << format_double(peak.fractions[k]) << '\n';
  }
  std::vector<double> dm, du;
  for (const auto& r : recs) dm.push_back(r.mae[2] - r.mae[1]);
  for (std::size_t t = 0; t < u[0].size(); ++t) du.push_back(u[2][t] - u[1][t]);
  const auto im = paired_bootstrap(dm, resamples, 0.95, seed);
  const auto iu = block_bootstrap(du, block, resamples, 0.95, seed);
  os << "[dl-lime minus lime]\n"
     << "mae = " << format_double(im.estimate) << '\n'
     << "mae_ci95 = " << format_double(im.lo) << ' ' << format_double(im.hi) << '\n'
     << "utility = " << format_double(iu.estimate) << '\n'
     << "utility_ci95 = " << format_double(iu.lo) << ' ' << format_double(iu.hi) << '\n';
}

}  // namespace rrmx::eval
