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

namespace phri::sim {

/// Admittance controller and plant constants. Angles are in turns.
struct MotorParams {
  double m = 1.0;       // virtual inertia
  double c = 50.0;      // virtual damping
  double k = 25.0;      // virtual spring
  double eta = 0.9;     // torque EMA smoothing
  double mu = 0.5;      // anti-resistance gain
  double kappa = 1.0;   // torque constant; current is expressed in torque units
  double dt = 1.0 / 30.0;
  double plant_tau = 0.1;      // velocity tracking time constant of the plant
  double plant_inertia = 0.1;  // scales how strongly the rope load perturbs the plant

  /// Throws ParameterError unless every constant is positive and eta < 1.
  void validate() const;
};

struct Commands {
  double theta = 0.0;
  double theta_dot = 0.0;
  double tau = 0.0;
};

struct MotorState {
  double theta = 0.0;
  double theta_dot = 0.0;
  Commands last;          // commands sent on the previous step
  double tau_mean = 0.0;  // EMA of the current-derived torque
  double tau = 0.0;       // external torque estimate
  double current = 0.0;   // measured current
};

/// Action layout: (theta_cmd, theta_dot_cmd, tau_cmd) deltas.
using Action = std::array<double, 3>;

struct CommandStep {
  Commands commands;
  Action action{};
};

/// Updates tau_mean and tau from a measured current.
MotorState torque_estimate(MotorState state, double current, const MotorParams& params);

double admittance_accel(const MotorState& state, double theta_ref, double theta_dot_ref, const MotorParams& params);

CommandStep command_step(const MotorState& state, double accel, const MotorParams& params);

/// First-order velocity tracking plus an external load. The measured current
/// is the torque the motor spends on tracking plus the torque command plus the
/// load it feels, so the estimate tau follows the load with a positive sign.
MotorState plant_step(MotorState state, const Commands& commands, double load_torque, const MotorParams& params);

struct LoopStep {
  MotorState state;  // after the plant has moved
  Commands commands;
  Action action{};
};

/// One full control period: estimate, admittance, commands, plant.
LoopStep closed_loop_step(const MotorState& state, double theta_ref, double theta_dot_ref, double load_torque,
                          const MotorParams& params);

}  // namespace phri::sim
