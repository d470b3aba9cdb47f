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

#include "phri/sim/profile.hpp"

#include <cmath>

#include "phri/common/error.hpp"

namespace phri::sim {

ProfileParams ProfileParams::for_condition(Motion motion, Speed speed) {
  ProfileParams p;
  p.motion = motion;
  if (motion == Motion::kRotation) {
    p.v = speed == Speed::kSlow ? 0.8 : 1.2;
  } else {
    p.v = speed == Speed::kSlow ? 0.5 : 1.0;
  }
  return p;
}

double ProfileParams::period() const { return motion == Motion::kRotation ? 4.0 * t_a + 2.0 * t_c : t_s; }

void ProfileParams::validate() const {
  if (!(v > 0.0)) throw ParameterError("profile velocity must be positive");
  if (motion == Motion::kRotation && !(t_a > 0.0 && t_c >= 0.0)) throw ParameterError("bad trapezoid timing");
  if (motion == Motion::kSwing && !(t_s > 0.0)) throw ParameterError("swing period must be positive");
}

double reference_velocity(const ProfileParams& p, double t) {
  if (t < 0.0) throw ParameterError("profile time must be non-negative");
  if (p.motion == Motion::kSwing) return p.v * std::cos(2.0 * std::numbers::pi * t / p.t_s);

  const double ta = p.t_a;
  const double tc = p.t_c;
  t = std::fmod(t, p.period());
  if (t < ta) return p.v * t / ta;
  if (t <= ta + tc) return p.v;
  if (t < 3.0 * ta + tc) return p.v - p.v * (t - (ta + tc)) / ta;
  if (t <= 3.0 * ta + 2.0 * tc) return -p.v;
  return -p.v + p.v * (t - (3.0 * ta + 2.0 * tc)) / ta;
}

ReferenceTrace integrate_reference(const ProfileParams& profile, double duration, double dt) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  if (duration < 0.0) throw ParameterError("duration must be non-negative");
  const auto steps = static_cast<std::size_t>(std::floor(duration / dt + 0.5));
  ReferenceTrace r;
  r.theta.resize(steps + 1);
  r.theta_dot.resize(steps + 1);
  double theta = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    r.theta[k] = theta;
    r.theta_dot[k] = reference_velocity(profile, static_cast<double>(k) * dt);
    theta += r.theta_dot[k] * dt;
  }
  return r;
}

}  // namespace phri::sim
