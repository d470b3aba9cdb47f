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

#include "phri/sim/motor.hpp"

#include <cmath>

#include "phri/common/error.hpp"

namespace phri::sim {

void MotorParams::validate() const {
  const double all[] = {m, c, k, eta, mu, kappa, dt, plant_tau, plant_inertia};
  for (double v : all) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("motor parameters must be positive and finite");
  }
  if (eta >= 1.0) throw ParameterError("torque smoothing factor must lie in (0, 1)");
}

MotorState torque_estimate(MotorState state, double current, const MotorParams& params) {
  const double tau_i = params.kappa * current;
  state.current = current;
  state.tau_mean = params.eta * state.tau_mean + (1.0 - params.eta) * tau_i;
  state.tau = tau_i - state.tau_mean;
  return state;
}

double admittance_accel(const MotorState& state, double theta_ref, double theta_dot_ref, const MotorParams& params) {
  if (params.m == 0.0) throw ParameterError("virtual inertia must be nonzero");
  return (state.tau - params.c * (state.theta_dot - theta_dot_ref) - params.k * (state.theta - theta_ref)) / params.m;
}

CommandStep command_step(const MotorState& state, double accel, const MotorParams& params) {
  CommandStep out;
  out.commands.theta_dot = state.theta_dot + accel * params.dt;
  out.commands.theta = state.theta + out.commands.theta_dot * params.dt;
  out.commands.tau = -params.mu * state.tau;
  out.action = {out.commands.theta - state.last.theta, out.commands.theta_dot - state.last.theta_dot,
                out.commands.tau - state.last.tau};
  return out;
}

MotorState plant_step(MotorState state, const Commands& commands, double load_torque, const MotorParams& params) {
  if (!std::isfinite(commands.theta) || !std::isfinite(commands.theta_dot) || !std::isfinite(commands.tau) ||
      !std::isfinite(load_torque)) {
    throw NumericError("plant received a non-finite command or load");
  }
  const double dt = params.dt;
  const double track = (commands.theta_dot - state.theta_dot) * (1.0 - std::exp(-dt / params.plant_tau)) / dt;
  state.theta_dot += dt * (track + load_torque / params.plant_inertia);
  state.theta += dt * state.theta_dot;
  state.current = (params.plant_inertia * track + commands.tau + load_torque) / params.kappa;
  state.last = commands;
  return state;
}

LoopStep closed_loop_step(const MotorState& state, double theta_ref, double theta_dot_ref, double load_torque,
                          const MotorParams& params) {
  MotorState s = torque_estimate(state, state.current, params);
  const double accel = admittance_accel(s, theta_ref, theta_dot_ref, params);
  CommandStep cmd = command_step(s, accel, params);
  LoopStep out;
  out.commands = cmd.commands;
  out.action = cmd.action;
  out.state = plant_step(s, cmd.commands, load_torque, params);
  return out;
}

}  // namespace phri::sim
