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
#include <optional>
#include <string>
#include <vector>

#include "phri/eval/run_config.hpp"
#include "phri/model/config.hpp"
#include "phri/model/trainer.hpp"

namespace phri::eval {

/// Outcome of training and testing one flag combination with one seed.
struct CellResult {
  model::AblationFlags flags;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string message;  // failure reason, empty on success
  std::vector<double> action_per_trajectory;
  std::vector<double> obs_per_trajectory;
  double action_mse = 0.0;  // mean over test trajectories
  double obs_mse = 0.0;
  std::optional<double> silhouette;  // test latents over condition labels

  bool operator==(const CellResult&) const = default;
};

void write_cell_result(const std::filesystem::path& path, const CellResult& result);
CellResult read_cell_result(const std::filesystem::path& path);

/// Trains one cell on the train split (validated on val), evaluates on test
/// and writes config.ini, curve.csv, latent.csv, latent_metrics.csv,
/// model.bin and result.json into `dir`. Numeric failures are reported in
/// the result rather than thrown.
CellResult run_cell(const sim::Dataset& dataset, const RunConfig& config, const model::AblationFlags& flags,
                    std::uint64_t seed, const std::filesystem::path& dir);

/// Directory name of a cell, e.g. "+D+A+C_seed3".
std::string cell_name(const model::AblationFlags& flags, std::uint64_t seed);

/// One table row: statistics over the per-seed test means.
struct AblationRow {
  model::AblationFlags flags;
  int seeds = 0;     // successful cells
  int failures = 0;  // cells that aborted
  model::Summary action;
  model::Summary obs;
  std::optional<double> silhouette;  // mean over seeds with a defined value
};

struct AblationReport {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;  // eight, ordered as AblationFlags::all()
  std::vector<CellResult> cells;
};

AblationReport aggregate(const std::vector<CellResult>& cells, const std::vector<std::uint64_t>& seeds);

void write_report_csv(const std::filesystem::path& path, const AblationReport& report);
void write_report_markdown(const std::filesystem::path& path, const AblationReport& report);

/// Runs every flag combination for every seed, `config.jobs` cells at a
/// time in forked worker processes, then writes report.csv and report.md.
/// Each cell lands in out_dir/cells/<cell_name>.
AblationReport run_ablation(const sim::Dataset& dataset, const RunConfig& config,
                            const std::filesystem::path& out_dir);

}  // namespace phri::eval
