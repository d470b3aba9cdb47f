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
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phri/sim/generator.hpp"

namespace phri::sim {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kGeneratorVersion = "phri-sim 1";

struct DatasetSpec {
  int train_per_condition = 4;
  int val_per_condition = 1;
  int test_per_condition = 1;
  int n_steps = 300;
  std::uint64_t seed = 1;
  GeneratorParams params;

  static DatasetSpec desk_scale();
  static DatasetSpec full_scale();  // 11/3/3 trajectories of 900 steps
  void validate() const;
};

struct TrajectoryRecord {
  std::string id;  // also the CSV file stem
  std::string split;
  Condition condition;
  std::uint64_t seed = 0;
  int n_steps = 0;
  std::vector<Condition> phases;  // equal-length phases in order; one entry for a single-condition trajectory

  std::vector<int> labels() const;

  bool operator==(const TrajectoryRecord&) const = default;
};

struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // standard deviation, with near-constant channels set to 1

  Eigen::MatrixXd apply(const Eigen::MatrixXd& obs) const;
  bool operator==(const Standardization& o) const { return mean == o.mean && scale == o.scale; }
};

/// Per-channel mean and population standard deviation over the stacked rows.
Standardization fit_standardization(const std::vector<const Eigen::MatrixXd*>& blocks);

struct Manifest {
  int schema_version = kManifestSchemaVersion;
  std::string generator_version = kGeneratorVersion;
  double dt = 1.0 / 30.0;
  int n_steps = 0;
  std::uint64_t base_seed = 0;
  std::string schedule = "single";
  double noise_sigma = 0.01;
  double plant_tau = 0.1;
  std::vector<TrajectoryRecord> trajectories;
  Standardization observation_stats;  // over the train split
  Standardization action_stats;       // over the train split

  bool operator==(const Manifest&) const = default;
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

/// CSV with header t,o_0..o_59,a_0..a_2 and 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Reads observations and actions back; condition, seed and labels come from the manifest.
void read_trajectory_csv(const std::filesystem::path& path, Eigen::MatrixXd& observations, Eigen::MatrixXd& actions);

/// Writes every trajectory plus manifest.json. Refuses a directory that
/// already holds a manifest unless force is set, in which case previous
/// trajectory files listed there are removed first.
Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& dir, bool force);

struct Dataset {
  Manifest manifest;
  std::vector<Trajectory> trajectories;  // manifest order; commands are rebuilt from the actions

  std::vector<const Trajectory*> split(const std::string& name) const;
};

Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace phri::sim
