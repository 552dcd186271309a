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

#include <optional>
#include <vector>

namespace rrmx::radar {

/// Advances one target by one cycle given two standard-normal draws.
inline TargetTruth propagate_target(const TargetTruth& truth, const MotionModel& model,
                                    const Vec2& std_normal) {
  TargetTruth next = truth;
  next.state = model.transition * truth.state +
               model.noise_gain * (std::sqrt(model.accel_variance) * std_normal);
  return next;
}

inline std::vector<TargetTruth> propagate_targets(const std::vector<TargetTruth>& truths,
                                                  const MotionModel& model,
                                                  RandomStream& rng) {
  std::vector<TargetTruth> out;
  out.reserve(truths.size());
  for (const auto& t : truths) {
    const double z0 = rng.normal();
    const double z1 = rng.normal();
    out.push_back(propagate_target(t, model, Vec2(z0, z1)));
  }
  return out;
}

/// Noise-free polar observation h(x) = [range, azimuth].
inline Vec2 polar_of(const Vec4& state) {
  const double r = std::hypot(state(0), state(1));
  if (r < 1.0) throw SingularityError("polar measurement: target within 1 m of the radar");
  return Vec2(r, std::atan2(state(1), state(0)));
}

/// Polar measurement with noise L z, where L L^T = R and z is standard normal.
inline Vec2 polar_measurement(const TargetTruth& truth, const Mat2& R, const Vec2& std_normal) {
  Vec2 z = polar_of(truth.state);
  Eigen::LLT<Mat2> llt(R);
  Mat2 L = Mat2::Zero();
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    // R = 0 (or semidefinite diagonal) is allowed for noise-free probes.
    L(0, 0) = std::sqrt(std::max(R(0, 0), 0.0));
    L(1, 1) = std::sqrt(std::max(R(1, 1), 0.0));
  }
  z += L * std_normal;
  z(1) = wrap_angle(z(1));
  return z;
}

inline Vec2 polar_measurement(const TargetTruth& truth, const Mat2& R, RandomStream& rng) {
  const double z0 = rng.normal();
  const double z1 = rng.normal();
  return polar_measurement(truth, R, Vec2(z0, z1));
}

inline Vec2 polar_to_cartesian(const Vec2& z) {
  return Vec2(z(0) * std::cos(z(1)), z(0) * std::sin(z(1)));
}

/// Dwell- and range-dependent measurement covariance. Noise scales with the
/// reciprocal of SNR, which grows as tau / r^4. Returns nullopt when the dwell
/// is too short to produce a measurement.
inline std::optional<Mat2> measurement_noise_cov(const SensorModel& sensor, double dwell,
                                                 double true_range) {
  if (dwell < sensor.min_dwell) return std::nullopt;
  const double rr = true_range / sensor.ref_range;
  const double scale = rr * rr * rr * rr * (sensor.nominal_dwell / dwell);
  Mat2 R = Mat2::Zero();
  R(0, 0) = sensor.range_var * scale;
  R(1, 1) = sensor.azimuth_var * scale;
  return R;
}

/// Position-block trace of a state covariance.
inline double tracking_cost(const Mat4& P) { return P(0, 0) + P(1, 1); }

/// Position NEES e^T P_pos^-1 e of an estimate against the true state.
inline double position_nees(const Track& track, const Vec4& truth) {
  const Vec2 e = truth.head<2>() - track.estimate.head<2>();
  const Mat2 P = track.cov.topLeftCorner<2, 2>();
  Eigen::LLT<Mat2> llt(P);
  if (llt.info() != Eigen::Success)
    throw SingularityError("position_nees: position covariance is not positive definite");
  return e.dot(llt.solve(e));
}

inline void symmetrize(Mat4& P) { P = 0.5 * (P + P.transpose()).eval(); }

inline Track ekf_predict(const Track& track, const MotionModel& model) {
  if (track.status == TrackStatus::kUntracked)
    throw ContractViolation("ekf_predict: untracked track has no estimate");
  Track out = track;
  out.estimate = model.transition * track.estimate;
  out.cov = model.transition * track.cov * model.transition.transpose() + model.process_cov;
  symmetrize(out.cov);
  out.cost = tracking_cost(out.cov);
  return out;
}

/// Jacobian of h at the given state.
inline Eigen::Matrix<double, 2, 4> polar_jacobian(const Vec4& x) {
  const double r2 = x(0) * x(0) + x(1) * x(1);
  const double r = std::sqrt(r2);
  if (r < 1.0) throw SingularityError("polar jacobian: estimate within 1 m of the radar");
  Eigen::Matrix<double, 2, 4> H = Eigen::Matrix<double, 2, 4>::Zero();
  H(0, 0) = x(0) / r;
  H(0, 1) = x(1) / r;
  H(1, 0) = -x(1) / r2;
  H(1, 1) = x(0) / r2;
  return H;
}

/// Kalman measurement update given an already-wrapped innovation and the
/// linearised observation matrix.
inline Track kalman_update(const Track& track, const Vec2& innovation,
                           const Eigen::Matrix<double, 2, 4>& H, const Mat2& R) {
  const Mat2 S = H * track.cov * H.transpose() + R;
  Eigen::FullPivLU<Mat2> lu(S);
  if (!lu.isInvertible() || !std::isfinite(S.determinant()))
    throw SingularityError("ekf_update: innovation covariance is singular");
  const Eigen::Matrix<double, 4, 2> K = track.cov * H.transpose() * lu.inverse();
  Track out = track;
  out.estimate = track.estimate + K * innovation;
  out.cov = (Mat4::Identity() - K * H) * track.cov;
  symmetrize(out.cov);
  out.cost = tracking_cost(out.cov);
  return out;
}

inline Track ekf_update(const Track& track, const Vec2& z, const Mat2& R) {
  const auto H = polar_jacobian(track.estimate);
  Vec2 innovation = z - polar_of(track.estimate);
  innovation(1) = wrap_angle(innovation(1));
  return kalman_update(track, innovation, H, R);
}

}  // namespace rrmx::radar
