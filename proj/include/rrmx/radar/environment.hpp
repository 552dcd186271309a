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

#include "rrmx/radar/association.hpp"
#include "rrmx/radar/detection.hpp"
#include "rrmx/radar/models.hpp"
#include "rrmx/radar/tracking.hpp"

#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

namespace rrmx::radar {

/// Everything needed to build a scene. Defaults reproduce the reference
/// experiment; the spawn-schedule fields exist so shorter runs can be
/// populated more densely.
struct EnvConfig {
  int max_targets = 5;
  double period = 2.5;
  double accel_variance = 16.0;
  SensorModel sensor{};
  ScanModel scan{};
  RewardConfig reward{};
  double gate = 500.0;
  double init_pos_std = 100.0;
  double init_vel_std = 50.0;
  double join_prob = 0.03;
  int join_interval = 100;
  int max_lifetime = 3000;
  double spawn_range_min = 2000.0;
  double spawn_range_max = 15000.0;
  double speed_min = 10.0;
  double speed_max = 100.0;
  int initial_targets = 2;

  void validate() const {
    if (max_targets < 1) throw ContractViolation("EnvConfig: max_targets must be >= 1");
    if (!(period > 0)) throw ContractViolation("EnvConfig: period must be > 0");
    sensor.validate();
    reward.validate();
    if (join_interval < 1) throw ContractViolation("EnvConfig: join_interval must be >= 1");
    if (!(spawn_range_min > 0 && spawn_range_min <= spawn_range_max &&
          spawn_range_max < kSurveillanceRadius))
      throw ContractViolation("EnvConfig: bad spawn annulus");
    if (!(speed_min >= 0 && speed_min <= speed_max))
      throw ContractViolation("EnvConfig: bad speed range");
    if (initial_targets < 0 || initial_targets > max_targets)
      throw ContractViolation("EnvConfig: initial_targets out of range");
  }
};

/// Stream identifiers; one engine per concern.
enum class Stream : std::uint64_t { kSpawn = 1, kMotion = 2, kMeasurement = 3, kDetection = 4 };

/// What the agent can see after a step: per slot estimate and cost of the
/// confirmed tracks, zeros elsewhere.
struct Observation {
  std::vector<Vec2> positions;
  VectorXd costs;
  std::vector<bool> tracked;
};

/// Multi-target scanning/tracking radar. Slot indices 0..N-1 name target
/// slots; each live target owns one slot for its whole life.
///
/// Random draws per cycle are a fixed function of N and the slot counter,
/// never of the action, so replicas built from the same seed see common
/// random numbers.
class RadarEnvironment {
 public:
  RadarEnvironment(EnvConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        motion_(MotionModel::constant_velocity(cfg_.period, cfg_.accel_variance)),
        spawn_rng_(seed, static_cast<std::uint64_t>(Stream::kSpawn)),
        motion_rng_(seed, static_cast<std::uint64_t>(Stream::kMotion)),
        meas_rng_(seed, static_cast<std::uint64_t>(Stream::kMeasurement)),
        det_rng_(seed, static_cast<std::uint64_t>(Stream::kDetection)) {
    cfg_.validate();
    const auto n = static_cast<std::size_t>(cfg_.max_targets);
    truths_.assign(n, std::nullopt);
    tracks_.assign(n, Track{});
    candidates_.assign(n, Candidate{});
    just_confirmed_.assign(n, false);
    for (int i = 0; i < cfg_.initial_targets; ++i) spawn_one();
  }

  const EnvConfig& config() const { return cfg_; }
  const MotionModel& motion() const { return motion_; }
  std::int64_t slot() const { return slot_; }
  int max_targets() const { return cfg_.max_targets; }
  const std::vector<std::optional<TargetTruth>>& truths() const { return truths_; }
  const std::vector<Track>& tracks() const { return tracks_; }

  int live_targets() const {
    int n = 0;
    for (const auto& t : truths_) n += t.has_value() ? 1 : 0;
    return n;
  }

  /// Places a target into a slot directly (scripted scenarios and tests).
  void insert_target(std::size_t index, TargetTruth truth) {
    if (index >= truths_.size()) throw ContractViolation("insert_target: slot out of range");
    clear_slot(index);
    truth.id = next_id_++;
    truths_[index] = truth;
  }

  Observation observe() const {
    Observation obs;
    const auto n = static_cast<std::size_t>(cfg_.max_targets);
    obs.positions.assign(n, Vec2::Zero());
    obs.costs = VectorXd::Zero(cfg_.max_targets);
    obs.tracked.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (tracks_[i].status != TrackStatus::kConfirmed) continue;
      obs.positions[i] = tracks_[i].estimate.head<2>();
      obs.costs(static_cast<Eigen::Index>(i)) = tracks_[i].cost;
      obs.tracked[i] = true;
    }
    return obs;
  }

  /// One measurement cycle. `lambda` only enters the reward.
  StepOutcome step(const VectorXd& action, double lambda) {
    const int n = cfg_.max_targets;
    const double T0 = cfg_.period;
    if (action.size() != n) throw ContractViolation("env_step: action has wrong length");
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(action(i) >= 0.0 && action(i) <= T0))
        throw ContractViolation("env_step: dwell outside [0, T0]");

    StepOutcome out;
    const double raw_sum = action.sum();
    out.usage = raw_sum / T0;
    out.executed_dwell = action;
    if (raw_sum > T0) out.executed_dwell *= T0 / raw_sum;
    out.scan_time = std::max(0.0, T0 - out.executed_dwell.sum());
    const ScanResult scan = scan_effectiveness(cfg_.scan, out.scan_time);
    out.gamma = scan.gamma;
    out.max_range = scan.max_range;

    // Fixed per-cycle draw pattern.
    std::vector<double> det_u(static_cast<std::size_t>(n));
    std::vector<Vec2> meas_z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) det_u[static_cast<std::size_t>(i)] = det_rng_.uniform();
    for (int i = 0; i < n; ++i) {
      const double a = meas_rng_.normal();
      const double b = meas_rng_.normal();
      meas_z[static_cast<std::size_t>(i)] = Vec2(a, b);
    }

    scan_and_initiate(scan.max_range, det_u, meas_z);
    update_confirmed(out.executed_dwell, meas_z);

    out.costs = VectorXd::Zero(n);
    out.estimates.assign(static_cast<std::size_t>(n), Vec2::Zero());
    for (int i = 0; i < n; ++i) {
      const auto& tr = tracks_[static_cast<std::size_t>(i)];
      if (tr.status != TrackStatus::kConfirmed) continue;
      out.costs(i) = tr.cost;
      out.estimates[static_cast<std::size_t>(i)] = tr.estimate.head<2>();
    }
    out.utility = -out.costs.sum() + cfg_.reward.beta * out.gamma;
    out.reward = out.utility - lambda * (out.usage - cfg_.reward.theta_max);

    advance_truths();
    ++slot_;
    retire();
    maybe_spawn();
    return out;
  }

  void write_log_header(std::ostream& os) const {
    os << "slot";
    for (int i = 0; i < cfg_.max_targets; ++i)
      os << ",truth_x_" << i << ",truth_y_" << i << ",truth_vx_" << i << ",truth_vy_" << i
         << ",est_x_" << i << ",est_y_" << i << ",cost_" << i;
    os << ",gamma,utility,reward,usage\n";
  }

  /// Appends one CSV row. Call with the truths as they were before step().
  static void write_log_row(std::ostream& os, std::int64_t slot,
                            const std::vector<std::optional<TargetTruth>>& truths,
                            const StepOutcome& out) {
    os << slot;
    for (std::size_t i = 0; i < truths.size(); ++i) {
      const Vec4 s = truths[i] ? truths[i]->state : Vec4::Zero();
      for (int k = 0; k < 4; ++k) os << ',' << format_double(s(k));
      os << ',' << format_double(out.estimates[i](0)) << ','
         << format_double(out.estimates[i](1)) << ','
         << format_double(out.costs(static_cast<Eigen::Index>(i)));
    }
    os << ',' << format_double(out.gamma) << ',' << format_double(out.utility) << ','
       << format_double(out.reward) << ',' << format_double(out.usage) << '\n';
  }

 private:
  struct Candidate {
    bool active = false;
    Vec2 last = Vec2::Zero();
    std::int64_t last_slot = 0;
    std::optional<Vec2> velocity;

    Vec2 predicted(std::int64_t now, double period) const {
      if (!velocity) return last;
      return last + *velocity * (period * static_cast<double>(now - last_slot));
    }
  };

  void scan_and_initiate(double max_range, const std::vector<double>& det_u,
                         const std::vector<Vec2>& meas_z) {
    const auto n = static_cast<std::size_t>(cfg_.max_targets);
    std::vector<Vec2> meas;
    std::vector<std::size_t> origin;
    std::vector<std::size_t> cand_slots;
    std::vector<Vec2> cand_pos;
    for (std::size_t i = 0; i < n; ++i) {
      if (!truths_[i] || tracks_[i].status == TrackStatus::kConfirmed) continue;
      const double r = truths_[i]->range();
      if (candidates_[i].active) {
        cand_slots.push_back(i);
        cand_pos.push_back(candidates_[i].predicted(slot_, cfg_.period));
      }
      if (r < 1.0 || !detection_trial(r, max_range, cfg_.scan, det_u[i])) continue;
      const auto R = measurement_noise_cov(cfg_.sensor, cfg_.sensor.nominal_dwell, r);
      meas.push_back(polar_to_cartesian(polar_measurement(*truths_[i], *R, meas_z[i])));
      origin.push_back(i);
    }

    std::vector<bool> hit(n, false);
    std::vector<std::optional<Vec2>> new_point(n);
    const auto assoc = gnn_associate(meas, cand_pos, cfg_.gate);
    std::vector<bool> cand_taken(n, false);
    for (std::size_t m = 0; m < meas.size(); ++m) {
      if (!assoc[m]) continue;
      const std::size_t c = cand_slots[*assoc[m]];
      hit[c] = true;
      cand_taken[c] = true;
      new_point[c] = meas[m];
    }
    // Unassociated detections (re)start their own target's candidate.
    std::vector<bool> restart(n, false);
    for (std::size_t m = 0; m < meas.size(); ++m) {
      if (assoc[m]) continue;
      const std::size_t o = origin[m];
      if (cand_taken[o]) continue;
      restart[o] = true;
      new_point[o] = meas[m];
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (!truths_[i] || tracks_[i].status == TrackStatus::kConfirmed) continue;
      auto& tr = tracks_[i];
      auto& cand = candidates_[i];
      if (restart[i]) {
        tr.history = push_history(0, true);
        cand = Candidate{true, *new_point[i], slot_, std::nullopt};
      } else {
        tr.history = push_history(tr.history, hit[i]);
        if (hit[i]) {
          const double dt = cfg_.period * static_cast<double>(slot_ - cand.last_slot);
          cand.velocity = (*new_point[i] - cand.last) / dt;
          cand.last = *new_point[i];
          cand.last_slot = slot_;
        }
        if (tr.history == 0) cand = Candidate{};
      }
      tr.status = status_from_history(tr.history);
      if (tr.status == TrackStatus::kConfirmed) {
        tr.estimate = Vec4(cand.last(0), cand.last(1), 0.0, 0.0);
        tr.cov = Vec4(cfg_.init_pos_std * cfg_.init_pos_std, cfg_.init_pos_std * cfg_.init_pos_std,
                      cfg_.init_vel_std * cfg_.init_vel_std, cfg_.init_vel_std * cfg_.init_vel_std)
                     .asDiagonal();
        tr.cost = tracking_cost(tr.cov);
        tr.target_id = truths_[i]->id;
        just_confirmed_[i] = true;
        cand = Candidate{};
      }
    }
  }

  void update_confirmed(const VectorXd& dwell, const std::vector<Vec2>& meas_z) {
    const auto n = static_cast<std::size_t>(cfg_.max_targets);
    for (std::size_t i = 0; i < n; ++i) {
      auto& tr = tracks_[i];
      if (tr.status != TrackStatus::kConfirmed || !truths_[i]) continue;
      if (just_confirmed_[i]) {
        just_confirmed_[i] = false;
        continue;
      }
      tr = ekf_predict(tr, motion_);
      const double r = truths_[i]->range();
      const auto R = measurement_noise_cov(cfg_.sensor, dwell(static_cast<Eigen::Index>(i)), r);
      if (!R || r < 1.0) continue;
      try {
        const Vec2 z = polar_measurement(*truths_[i], *R, meas_z[i]);
        tr = ekf_update(tr, z, *R);
      } catch (const SingularityError&) {
        // Degenerate geometry: keep the prediction.
      }
    }
  }

  void advance_truths() {
    for (auto& t : truths_) {
      const double a = motion_rng_.normal();
      const double b = motion_rng_.normal();
      if (t) *t = propagate_target(*t, motion_, Vec2(a, b));
    }
  }

  void retire() {
    for (std::size_t i = 0; i < truths_.size(); ++i) {
      if (!truths_[i]) continue;
      const bool too_old = slot_ - truths_[i]->birth_slot > cfg_.max_lifetime;
      const bool outside = truths_[i]->range() > kSurveillanceRadius;
      if (too_old || outside) clear_slot(i);
    }
  }

  void clear_slot(std::size_t i) {
    truths_[i].reset();
    tracks_[i] = Track{};
    candidates_[i] = Candidate{};
    just_confirmed_[i] = false;
  }

  void maybe_spawn() {
    if (slot_ % cfg_.join_interval != 0) return;
    const double u = spawn_rng_.uniform();
    if (live_targets() >= cfg_.max_targets) return;
    if (u < cfg_.join_prob) spawn_one();
  }

  void spawn_one() {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    const double r2 = spawn_rng_.uniform(cfg_.spawn_range_min * cfg_.spawn_range_min,
                                         cfg_.spawn_range_max * cfg_.spawn_range_max);
    const double bearing = spawn_rng_.uniform(0.0, kTwoPi);
    const double speed = spawn_rng_.uniform(cfg_.speed_min, cfg_.speed_max);
    const double heading = spawn_rng_.uniform(0.0, kTwoPi);
    std::size_t free = truths_.size();
    for (std::size_t i = 0; i < truths_.size(); ++i)
      if (!truths_[i]) {
        free = i;
        break;
      }
    if (free == truths_.size()) return;
    const double r = std::sqrt(r2);
    TargetTruth t;
    t.id = next_id_++;
    t.birth_slot = slot_;
    t.state << r * std::cos(bearing), r * std::sin(bearing), speed * std::cos(heading),
        speed * std::sin(heading);
    clear_slot(free);
    truths_[free] = t;
  }

  EnvConfig cfg_;
  MotionModel motion_;
  RandomStream spawn_rng_;
  RandomStream motion_rng_;
  RandomStream meas_rng_;
  RandomStream det_rng_;
  std::vector<std::optional<TargetTruth>> truths_;
  std::vector<Track> tracks_;
  std::vector<Candidate> candidates_;
  std::vector<bool> just_confirmed_;
  std::int64_t slot_ = 0;
  int next_id_ = 1;
};

}  // namespace rrmx::radar
