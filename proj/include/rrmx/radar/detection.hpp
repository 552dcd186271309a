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

#include "rrmx/radar/models.hpp"

#include <cmath>
#include <numbers>

namespace rrmx::radar {

/// Beam dwell within a full 360 degree scan of duration scan_time.
inline double beam_duration(double scan_time, double beam_spacing_deg) {
  return scan_time * beam_spacing_deg / 360.0;
}

/// Swerling-I threshold SNR for the requested (P_f, P_d) pair.
inline double required_snr(double false_alarm, double detection) {
  if (!(false_alarm > 0.0 && false_alarm < detection && detection < 1.0))
    throw ContractViolation("required_snr: need 0 < P_f < P_d < 1");
  return std::log(false_alarm) / std::log(detection) - 1.0;
}

/// Radar range equation SNR for a given beam dwell and range.
inline double scan_snr(const ScanModel& scan, double beam_dwell, double range) {
  constexpr double kFourPiCubed = 64.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi;
  const double num = scan.tx_power * beam_dwell * scan.tx_gain * scan.rx_gain *
                     scan.wavelength * scan.wavelength * scan.rcs;
  const double r2 = range * range;
  return num / (kFourPiCubed * r2 * r2 * scan.loss * scan.boltzmann * scan.system_temp);
}

struct ScanResult {
  double gamma = 0.0;
  double max_range = 0.0;
};

inline ScanResult scan_effectiveness(const ScanModel& scan, double scan_time) {
  if (scan_time < 0.0) throw ContractViolation("scan_effectiveness: negative scan time");
  if (scan_time == 0.0) return {};
  ScanResult out;
  if (scan.mode == ScanMode::kCalibrated) {
    const double ratio = scan_time / scan.ref_scan_time;
    out.gamma = std::sqrt(ratio);
    out.max_range = scan.ref_range * std::sqrt(out.gamma);
  } else {
    // SNR(r) = A / r^4 = SNR_min  =>  r_max = (A / SNR_min)^(1/4)
    const double a = scan_snr(scan, beam_duration(scan_time, scan.beam_spacing_deg), 1.0);
    out.max_range = std::pow(a / required_snr(scan.false_alarm, scan.detection), 0.25);
    const double q = out.max_range / scan.ref_range;
    out.gamma = q * q;
  }
  return out;
}

/// Single-scan detection probability of a Swerling-I target, calibrated so
/// that p = P_d exactly at r_true = r_max.
inline double detection_probability(double true_range, double max_range, const ScanModel& scan) {
  if (!(true_range > 0.0)) throw ContractViolation("detection_probability: range must be > 0");
  if (true_range > kSurveillanceRadius) return 0.0;
  const double snr_min = required_snr(scan.false_alarm, scan.detection);
  const double q = max_range / true_range;
  const double snr = snr_min * q * q * q * q;
  return std::pow(scan.false_alarm, 1.0 / (1.0 + snr));
}

/// Bernoulli draw given a pre-drawn uniform, so callers can keep streams aligned.
inline bool detection_trial(double true_range, double max_range, const ScanModel& scan,
                            double uniform) {
  return uniform < detection_probability(true_range, max_range, scan);
}

inline bool detection_trial(double true_range, double max_range, const ScanModel& scan,
                            RandomStream& rng) {
  return detection_trial(true_range, max_range, scan, rng.uniform());
}

}  // namespace rrmx::radar
