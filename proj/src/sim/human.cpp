// Copyright 2026 The phri Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phri/sim/human.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "phri/common/error.hpp"

namespace phri::sim {
namespace {

// Lateral distance from the body midline to the active hand.
constexpr double kBodyOffset = 0.26;

enum Kp {
  kNose, kNeck,
  kRShoulder, kRElbow, kRWrist,
  kLShoulder, kLElbow, kLWrist,
  kRHip, kRKnee, kRAnkle,
  kLHip, kLKnee, kLAnkle,
  kREye, kLEye, kREar, kLEar,
};

constexpr std::array<std::pair<int, int>, 8> kMirrorPairs = {{
    {kRShoulder, kLShoulder}, {kRElbow, kLElbow}, {kRWrist, kLWrist}, {kRHip, kLHip},
    {kRKnee, kLKnee}, {kRAnkle, kLAnkle}, {kREye, kLEye}, {kREar, kLEar},
}};

// Standing pose in metres; x to the right, y forward, z up. The origin sits
// in the sagittal plane of the rope device, so the body of a right-handed
// participant stands left of it and mirroring moves the person, not the rope.
const std::array<Eigen::Vector3d, kKeypointCount>& rest_pose() {
  static const std::array<Eigen::Vector3d, kKeypointCount> pose = [] {
    std::array<Eigen::Vector3d, kKeypointCount> p = {{
        {0.0, 0.08, 1.60}, {0.0, 0.0, 1.45},
        {0.18, 0.0, 1.42}, {0.24, 0.15, 1.20}, {0.26, 0.35, 1.10},
        {-0.18, 0.0, 1.42}, {-0.21, 0.0, 1.15}, {-0.22, 0.05, 0.90},
        {0.10, 0.0, 0.95}, {0.10, 0.02, 0.50}, {0.10, 0.0, 0.08},
        {-0.10, 0.0, 0.95}, {-0.10, 0.02, 0.50}, {-0.10, 0.0, 0.08},
        {0.03, 0.07, 1.65}, {-0.03, 0.07, 1.65}, {0.07, 0.0, 1.62}, {-0.07, 0.0, 1.62},
    }};
    for (auto& k : p) k.x() -= kBodyOffset;
    return p;
  }();
  return pose;
}

// Rope end the right hand circles around or swings from.
const Eigen::Vector3d kOrbitCentre(0.0, 0.45, 1.15);
const Eigen::Vector3d kSwingPivot(0.0, 0.30, 1.35);

double hand_lag(Speed speed) { return speed == Speed::kSlow ? 0.12 : 0.07; }
constexpr double kSwingArm = 0.35;

// Share of the hand displacement each keypoint picks up.
double coupling(int kp) {
  switch (kp) {
    case kRHip: case kLHip: return 0.12;
    case kRKnee: case kLKnee: return 0.07;
    case kRAnkle: case kLAnkle: return 0.04;
    case kLElbow: case kLWrist: return 0.2;
    default: return 0.25;  // head, neck, shoulders
  }
}

double sway_scale(int kp) {
  switch (kp) {
    case kRKnee: case kLKnee: return 0.5;
    case kRAnkle: case kLAnkle: return 0.2;
    default: return 1.0;
  }
}

// Share of the bracing shift each keypoint takes: feet stay planted.
double brace_scale(int kp) {
  switch (kp) {
    case kRKnee: case kLKnee: return 0.5;
    case kRAnkle: case kLAnkle: return 0.0;
    default: return 1.0;
  }
}

}  // namespace

double rotation_radius(Speed speed, double hand_rate) {
  const double nominal = speed == Speed::kSlow ? 0.30 : 0.22;
  return nominal * (0.6 + 0.4 * std::clamp(std::abs(hand_rate), 0.0, kMaxHandRate));
}

const std::array<std::string, kKeypointCount>& keypoint_names() {
  static const std::array<std::string, kKeypointCount> names = {
      "nose", "neck", "r_shoulder", "r_elbow", "r_wrist", "l_shoulder", "l_elbow", "l_wrist", "r_hip",
      "r_knee", "r_ankle", "l_hip", "l_knee", "l_ankle", "r_eye", "l_eye", "r_ear", "l_ear"};
  return names;
}

Eigen::VectorXd mirror_observation(const Eigen::VectorXd& obs) {
  if (obs.size() != kObservationDim) throw ParameterError("observation must have 60 entries");
  Eigen::VectorXd out = obs;
  for (auto [r, l] : kMirrorPairs) {
    out.segment<3>(3 * r) = obs.segment<3>(3 * l);
    out.segment<3>(3 * l) = obs.segment<3>(3 * r);
  }
  for (int i = 0; i < kObservationDim; i += 3) out(i) = -out(i);
  return out;
}

void HumanParams::validate() const {
  if (!(noise_sigma >= 0.0) || !(sway_sigma >= 0.0)) throw ParameterError("noise levels must be non-negative");
  if (!(dt > 0.0)) throw ParameterError("frame period must be positive");
  if (!(sway_pole >= 0.0 && sway_pole < 1.0)) throw ParameterError("sway pole must lie in [0, 1)");
  if (!(brace_lag > 0.0)) throw ParameterError("brace lag must be positive");
  if (!std::isfinite(brace_drop) || !std::isfinite(brace_lean)) throw ParameterError("brace shift must be finite");
}

HumanModel::HumanModel(Condition condition, std::uint64_t seed, HumanParams params)
    : condition_(condition), params_(params), rng_(seed) {
  params_.validate();
}

Eigen::VectorXd HumanModel::pose(double hand_phase, double hand_rate) const {
  const auto& rest = rest_pose();
  const double angle = 2.0 * std::numbers::pi * hand_phase;

  Eigen::Vector3d wrist;
  if (condition_.motion == Motion::kRotation) {
    const double r = rotation_radius(condition_.speed, hand_rate);
    wrist = kOrbitCentre + r * Eigen::Vector3d(std::cos(angle), std::sin(angle), 0.0);
  } else {
    wrist = kSwingPivot + kSwingArm * Eigen::Vector3d(0.0, std::sin(angle), -std::cos(angle));
  }

  // The whole body follows the hand to some degree: the torso leans, the
  // idle arm counter-swings and the weight shifts over the legs. Every
  // keypoint therefore carries task signal above the sensor noise.
  const Eigen::Vector3d disp = wrist - rest[kRWrist];
  std::array<Eigen::Vector3d, kKeypointCount> kp;
  for (int i = 0; i < kKeypointCount; ++i) {
    kp[static_cast<std::size_t>(i)] =
        rest[static_cast<std::size_t>(i)] + coupling(i) * disp + sway_scale(i) * sway_ + brace_scale(i) * brace_;
  }
  // Leaning back against the rope pull, more so the faster it turns.
  const Eigen::Vector3d pull(0.0, -0.04 * hand_rate, -0.01 * std::abs(hand_rate));
  for (int i : {kNose, kNeck, kRShoulder, kLShoulder, kREye, kLEye, kREar, kLEar, kLElbow, kLWrist}) {
    kp[static_cast<std::size_t>(i)] += pull;
  }
  kp[kLElbow] += Eigen::Vector3d(0.0, -0.15 * disp.y(), -0.1 * disp.z());
  kp[kLWrist] += Eigen::Vector3d(0.0, -0.3 * disp.y(), -0.2 * disp.z());
  const Eigen::Vector3d shoulder = kp[kRShoulder] + 0.1 * disp;
  kp[kRShoulder] = shoulder;
  kp[kRWrist] = wrist;
  kp[kRElbow] = 0.5 * (shoulder + wrist) + Eigen::Vector3d(0.06, 0.0, -0.04);

  Eigen::VectorXd obs(kObservationDim);
  for (int i = 0; i < kKeypointCount; ++i) obs.segment<3>(3 * i) = kp[static_cast<std::size_t>(i)];
  const Eigen::Vector3d pelvis = 0.5 * (kp[kRHip] + kp[kLHip]);
  obs.segment<3>(3 * kKeypointCount) = pelvis;
  obs.segment<3>(3 * kKeypointCount + 3) = started_ ? Eigen::Vector3d((pelvis - last_pelvis_) / params_.dt)
                                                    : Eigen::Vector3d::Zero();
  return obs;
}

HumanOutput HumanModel::observe(double theta, double theta_dot) {
  // Fast conditions are met with bent knees and a forward lean; the stance
  // settles over brace_lag after a condition switch.
  const Eigen::Vector3d brace_target = condition_.speed == Speed::kFast
                                           ? Eigen::Vector3d(0.0, params_.brace_lean, -params_.brace_drop)
                                           : Eigen::Vector3d::Zero();
  if (!started_) {
    hand_phase_ = theta;
    brace_ = brace_target;
  } else {
    brace_ += (1.0 - std::exp(-params_.dt / params_.brace_lag)) * (brace_target - brace_);
  }
  const double step = (1.0 - std::exp(-params_.dt / hand_lag(condition_.speed))) * (theta - hand_phase_);
  hand_phase_ += step;
  hand_rate_ = started_ ? step / params_.dt : theta_dot;
  for (int i = 0; i < 3; ++i) sway_(i) = params_.sway_pole * sway_(i) + params_.sway_sigma * rng_.normal();

  HumanOutput out;
  Eigen::VectorXd obs = pose(hand_phase_, hand_rate_);
  last_pelvis_ = obs.segment<3>(3 * kKeypointCount);
  started_ = true;
  if (condition_.arm == Arm::kLeft) obs = mirror_observation(obs);
  for (int i = 0; i < kObservationDim; ++i) obs(i) += params_.noise_sigma * rng_.normal();
  out.observation = std::move(obs);

  out.load_torque = params_.rope_spring * (hand_phase_ - theta) - params_.rope_damping * theta_dot +
                    params_.rope_swing * std::sin(2.0 * std::numbers::pi * hand_phase_);
  return out;
}

}  // namespace phri::sim
