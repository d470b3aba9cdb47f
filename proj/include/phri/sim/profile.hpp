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

#include <numbers>
#include <vector>

#include "phri/sim/condition.hpp"

namespace phri::sim {

struct ProfileParams {
  Motion motion = Motion::kRotation;
  double t_a = 1.0;  // acceleration time
  double t_c = 4.0;  // constant velocity time
  double t_s = 0.6 * std::numbers::pi;  // swing period
  double v = 0.8;    // peak velocity, turns/s

  static ProfileParams for_condition(Motion motion, Speed speed);

  /// Repeat period of the profile.
  double period() const;

  void validate() const;
};

/// Trapezoid (rotation) or cosine (swing) reference velocity. The rotation
/// profile restarts every period.
double reference_velocity(const ProfileParams& profile, double t);

struct ReferenceTrace {
  std::vector<double> theta;      // theta[k] is the angle at k * dt, starting at 0
  std::vector<double> theta_dot;  // theta_dot[k] is the velocity at k * dt
};

/// Euler-integrates the reference velocity over floor(duration / dt + 0.5)
/// steps; both sequences hold steps + 1 samples.
ReferenceTrace integrate_reference(const ProfileParams& profile, double duration, double dt);

}  // namespace phri::sim
