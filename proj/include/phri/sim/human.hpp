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

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "phri/common/random.hpp"
#include "phri/sim/condition.hpp"

namespace phri::sim {

/// Body-18 keypoint order (nose, neck, right arm, left arm, right leg, left
/// leg, eyes, ears). x points to the participant's right, with x = 0 the
/// sagittal plane of the rope device.
inline constexpr int kKeypointCount = 18;
inline constexpr int kObservationDim = 3 * kKeypointCount + 6;  // keypoints, pelvis position, pelvis velocity

const std::array<std::string, kKeypointCount>& keypoint_names();

/// Reflection across the sagittal plane: negates x and swaps left/right
/// keypoints. Applying it twice is the identity.
Eigen::VectorXd mirror_observation(const Eigen::VectorXd& obs);

/// Hand rates above this (turns/s) no longer widen the rotation orbit.
inline constexpr double kMaxHandRate = 1.5;

/// Radius of the wrist orbit in rotation: the arm reaches wider the faster
/// the rope turns.
double rotation_radius(Speed speed, double hand_rate);

struct HumanParams {
  double noise_sigma = 0.01;
  double dt = 1.0 / 30.0;
  double rope_spring = 0.5;    // reaction to the angle gap between motor and hand
  double rope_damping = 0.05;  // viscous reaction
  double rope_swing = 0.05;    // periodic pull of the rope mass
  double sway_sigma = 0.0015;  // idle sway innovation
  double sway_pole = 0.97;     // AR(1) pole of the sway
  double brace_drop = 0.05;    // crouch for fast conditions (m)
  double brace_lean = 0.03;    // forward lean for fast conditions (m)
  double brace_lag = 0.5;      // stance time constant (s)

  void validate() const;
};

struct HumanOutput {
  Eigen::VectorXd observation;  // kObservationDim
  double load_torque = 0.0;
};

/// Kinematic stand-in for the person holding the rope. The active hand
/// follows the motor angle through a first-order lag and the body stands
/// beside the device, braced lower for fast conditions. The scene is built
/// for the right arm and mirrored for the left, with noise added afterwards.
class HumanModel {
 public:
  HumanModel(Condition condition, std::uint64_t seed, HumanParams params = {});

  /// Advances one frame given the motor angle and velocity (turns, turns/s).
  HumanOutput observe(double theta, double theta_dot);

  /// Switches the condition mid-trajectory; lag and sway state carry over.
  void set_condition(Condition condition) { condition_ = condition; }

  const Condition& condition() const { return condition_; }

 private:
  Eigen::VectorXd pose(double hand_phase, double hand_rate) const;

  Condition condition_;
  HumanParams params_;
  Rng rng_;
  double hand_phase_ = 0.0;
  double hand_rate_ = 0.0;  // turns/s
  bool started_ = false;
  Eigen::Vector3d sway_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d brace_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d last_pelvis_ = Eigen::Vector3d::Zero();
};

}  // namespace phri::sim
