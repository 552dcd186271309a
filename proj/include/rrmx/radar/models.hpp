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

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace rrmx::radar {

/// Radius of the monitored area. Targets outside it are retired and never
/// detected.
inline constexpr double kSurveillanceRadius = 20000.0;

struct TargetTruth {
  int id = 0;
  Vec4 state = Vec4::Zero();  // [x, y, vx, vy] in m and m/s
  std::int64_t birth_slot = 0;

  Vec2 position() const { return state.head<2>(); }
  double range() const { return position().norm(); }
};

/// Constant-velocity motion with discrete white-noise acceleration.
///
/// The process noise enters as w = G a with a ~ N(0, sigma_w^2 I_2), so
/// Q = sigma_w^2 G G^T has rank 2 and is sampled through G directly.
struct MotionModel {
  double period = 2.5;          // T0, seconds
  double accel_variance = 16.0;  // sigma_w^2, (m/s^2)^2
  Mat4 transition = Mat4::Identity();
  Mat4 process_cov = Mat4::Zero();
  Eigen::Matrix<double, 4, 2> noise_gain = Eigen::Matrix<double, 4, 2>::Zero();

  static MotionModel constant_velocity(double period, double accel_variance) {
    if (!(period > 0.0) || !(accel_variance >= 0.0))
      throw ContractViolation("MotionModel: period must be > 0 and variance >= 0");
    MotionModel m;
    m.period = period;
    m.accel_variance = accel_variance;
    m.transition = Mat4::Identity();
    m.transition(0, 2) = period;
    m.transition(1, 3) = period;
    const double half_t2 = 0.5 * period * period;
    m.noise_gain << half_t2, 0.0,  //
        0.0, half_t2,              //
        period, 0.0,               //
        0.0, period;
    m.process_cov = accel_variance * m.noise_gain * m.noise_gain.transpose();
    return m;
  }
};

struct SensorModel {
  double range_var = 16.0;      // sigma_r0^2 at (r_ref, tau_nom), m^2
  double azimuth_var = 1e-6;    // sigma_theta0^2 at (r_ref, tau_nom), rad^2
  double ref_range = 10000.0;   // m
  double nominal_dwell = 0.45;  // s
  double min_dwell = 0.01;      // s

  void validate() const {
    if (!(range_var > 0 && azimuth_var > 0 && ref_range > 0 && nominal_dwell > 0 &&
          min_dwell > 0))
      throw ContractViolation("SensorModel: all fields must be strictly positive");
  }
};

enum class ScanMode { kCalibrated, kPhysical };

/// Scan/detection model. Calibrated mode pins r_max = r_0 at the reference
/// scan time; physical mode evaluates the radar range equation.
struct ScanModel {
  ScanMode mode = ScanMode::kCalibrated;
  double ref_scan_time = 0.25;  // tau_s_ref, s
  double ref_range = 10000.0;   // r_0, m
  double beam_spacing_deg = 1.0;  // phi

  // Physical-mode constants.
  double tx_power = 1.0;
  double tx_gain = 1.0;
  double rx_gain = 1.0;
  double wavelength = 1.0;
  double rcs = 1.0;
  double loss = 1.0;
  double boltzmann = 1.380649e-23;
  double system_temp = 290.0;

  double false_alarm = 1e-3;
  double detection = 0.9;
};

enum class TrackStatus { kUntracked, kTentative, kConfirmed };

struct Track {
  int target_id = -1;
  Vec4 estimate = Vec4::Zero();
  Mat4 cov = Mat4::Zero();
  std::uint8_t history = 0;  // bit 0 = latest scan
  TrackStatus status = TrackStatus::kUntracked;
  double cost = 0.0;
};

struct RewardConfig {
  double beta = 1e5;
  double theta_max = 0.9;
  double period = 2.5;
  int max_targets = 5;

  void validate() const {
    if (!(theta_max > 0.0 && theta_max <= 1.0))
      throw ContractViolation("RewardConfig: theta_max must lie in (0, 1]");
    if (!(beta > 0.0)) throw ContractViolation("RewardConfig: beta must be > 0");
  }
};

struct StepOutcome {
  VectorXd costs;               // per slot, m^2; zero where no confirmed track
  std::vector<Vec2> estimates;  // per slot, zero where no confirmed track
  VectorXd executed_dwell;      // after feasibility rescaling
  double scan_time = 0.0;       // tau_s
  double gamma = 0.0;
  double max_range = 0.0;
  double utility = 0.0;
  double reward = 0.0;
  double usage = 0.0;  // raw sum(tau) / T0
};

inline double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace rrmx::radar
