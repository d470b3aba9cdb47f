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

#include "phri/model/config.hpp"
#include "phri/model/trainer.hpp"
#include "phri/sim/dataset.hpp"

namespace phri::eval {

/// Everything a command needs besides paths: dataset recipe, model and
/// training settings, ablation seeds.
struct RunConfig {
  sim::DatasetSpec dataset = sim::DatasetSpec::desk_scale();
  model::ModelConfig model;
  int chunk_steps = 50;
  bool step_per_chunk = false;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int jobs = 1;

  /// Settings sized for the desk-scale dataset on one CPU core.
  static RunConfig desk_defaults();

  model::TrainOptions train_options() const;
  void validate() const;
};

/// Reads an INI file with sections [dataset] [motor] [human] [profile]
/// [model] [train] [ablate]. Keys not present keep their value from `base`;
/// unknown sections or keys throw ParameterError.
RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base);

/// Applies one "section.key=value" override.
void apply_override(RunConfig& config, const std::string& assignment);

/// Writes every key, so the file alone reproduces the run.
void write_run_config(const std::filesystem::path& path, const RunConfig& config);

}  // namespace phri::eval
