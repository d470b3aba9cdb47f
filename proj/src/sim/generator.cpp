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

#include "phri/sim/generator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phri/common/dft.hpp"
#include "phri/common/error.hpp"

namespace phri::sim {

std::vector<Condition> phase_conditions(const Condition& first, Schedule schedule) {
  if (schedule == Schedule::kSingle) return {first};
  std::vector<Condition> out;
  for (int k = 0; k < 4; ++k) {
    const int pair = ((first.motion == Motion::kSwing ? 2 : 0) + (first.speed == Speed::kFast ? 1 : 0) + k) % 4;
    out.push_back(Condition{pair >= 2 ? Motion::kSwing : Motion::kRotation, first.arm,
                            (pair & 1) ? Speed::kFast : Speed::kSlow});
  }
  return out;
}

Trajectory generate_trajectory(const Condition& condition, std::uint64_t seed, int n_steps,
                               const GeneratorParams& params) {
  if (n_steps < 1) throw ParameterError("trajectory needs at least one step");
  params.motor.validate();
  const double dt = params.motor.dt;
  HumanParams human = params.human;
  human.dt = dt;

  const std::vector<Condition> phases = phase_conditions(condition, params.schedule);
  const int phase_len = phase_length(n_steps, static_cast<int>(phases.size()));

  Trajectory traj;
  traj.condition = condition;
  traj.seed = seed;
  traj.dt = dt;
  traj.labels.resize(static_cast<std::size_t>(n_steps));
  traj.observations.resize(n_steps, kObservationDim);
  traj.actions.resize(n_steps, kActionDim);
  traj.commands.resize(n_steps, kActionDim);

  HumanModel human_model(condition, seed, human);
  MotorState state;
  double theta_ref = 0.0;
  int phase = -1;
  ProfileParams profile;
  double phase_start = 0.0;
  for (int k = 0; k < n_steps; ++k) {
    if (k / phase_len != phase) {
      phase = k / phase_len;
      const Condition& c = phases[static_cast<std::size_t>(phase)];
      profile = ProfileParams::for_condition(c.motion, c.speed);
      profile.t_a = params.timing.t_a;
      profile.t_c = params.timing.t_c;
      profile.t_s = params.timing.t_s;
      profile.validate();
      human_model.set_condition(c);
      phase_start = k * dt;
    }
    const double theta_dot_ref = reference_velocity(profile, k * dt - phase_start);

    const HumanOutput seen = human_model.observe(state.theta, state.theta_dot);
    LoopStep step;
    try {
      step = closed_loop_step(state, theta_ref, theta_dot_ref, seen.load_torque, params.motor);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at step " + std::to_string(k) + " of " + to_string(condition));
    }

    traj.labels[static_cast<std::size_t>(k)] = human_model.condition().index();
    traj.observations.row(k) = seen.observation.transpose();
    for (int j = 0; j < kActionDim; ++j) traj.actions(k, j) = step.action[static_cast<std::size_t>(j)];
    traj.commands.row(k) << step.commands.theta, step.commands.theta_dot, step.commands.tau;
    state = step.state;
    theta_ref += theta_dot_ref * dt;
  }
  if (!traj.observations.allFinite() || !traj.actions.allFinite()) {
    throw NumericError("non-finite sample in trajectory " + to_string(condition));
  }
  return traj;
}

Speed infer_speed(Motion motion, const Eigen::MatrixXd& actions, double dt, const ProfileParams& timing) {
  if (actions.rows() < 2 || actions.cols() != kActionDim) throw ParameterError("need at least two action rows");
  Eigen::VectorXd theta(actions.rows());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < actions.rows(); ++k) {
    acc += actions(k, 0);
    theta(k) = acc;
  }
  const ProfileParams slow = ProfileParams::for_condition(motion, Speed::kSlow);
  const ProfileParams fast = ProfileParams::for_condition(motion, Speed::kFast);
  if (motion == Motion::kRotation) {
    Eigen::VectorXd wave = (2.0 * std::numbers::pi * theta.array()).sin().matrix();
    // The reversing trapezoid puts the spectrum on a comb, so split at the
    // geometric mean to stay clear of the neighbouring teeth.
    const double f = dominant_frequency(wave, dt);
    return f > std::sqrt(slow.v * fast.v) ? Speed::kFast : Speed::kSlow;
  }
  // Swing angle amplitude is v * t_s / (2 pi).
  const double amplitude = 0.5 * (theta.maxCoeff() - theta.minCoeff());
  const double threshold = 0.5 * (slow.v + fast.v) * timing.t_s / (2.0 * std::numbers::pi);
  return amplitude > threshold ? Speed::kFast : Speed::kSlow;
}

}  // namespace phri::sim
