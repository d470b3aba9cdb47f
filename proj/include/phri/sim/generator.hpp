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

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "phri/sim/condition.hpp"
#include "phri/sim/human.hpp"
#include "phri/sim/motor.hpp"
#include "phri/sim/profile.hpp"

namespace phri::sim {

inline constexpr int kActionDim = 3;

enum class Schedule {
  kSingle,     // one condition for the whole trajectory
  kFourPhase,  // the four motion/speed pairs in turn, arm held fixed
};

struct GeneratorParams {
  MotorParams motor;
  HumanParams human;
  ProfileParams timing;  // t_a, t_c and t_s are taken from here; motion and v come from the condition
  Schedule schedule = Schedule::kSingle;
};

struct Trajectory {
  Condition condition;      // first (or only) condition
  std::vector<int> labels;  // per-step condition index
  std::uint64_t seed = 0;
  double dt = 1.0 / 30.0;
  Eigen::MatrixXd observations;  // steps x 60
  Eigen::MatrixXd actions;       // steps x 3, command deltas
  Eigen::MatrixXd commands;      // steps x 3, absolute commands (not persisted)

  Eigen::Index steps() const { return observations.rows(); }
};

/// Steps per phase when a trajectory of n_steps is split into n_phases.
inline int phase_length(int n_steps, int n_phases) { return (n_steps + n_phases - 1) / n_phases; }

/// Conditions visited by a four-phase trajectory starting at `first`.
std::vector<Condition> phase_conditions(const Condition& first, Schedule schedule);

Trajectory generate_trajectory(const Condition& condition, std::uint64_t seed, int n_steps,
                               const GeneratorParams& params = {});

/// True when a trajectory is long enough for infer_speed to separate the two
/// speeds (at least five seconds).
inline bool speed_is_inferable(Eigen::Index steps, double dt) { return static_cast<double>(steps) * dt >= 5.0; }

/// Classifies slow versus fast from the actions alone: rotation by the
/// dominant frequency of sin(2 pi theta_cmd), swing by the amplitude of
/// theta_cmd. theta_cmd is rebuilt as the running sum of action column 0.
Speed infer_speed(Motion motion, const Eigen::MatrixXd& actions, double dt, const ProfileParams& timing = {});

}  // namespace phri::sim
