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

#include <filesystem>
#include <optional>
#include <vector>

#include "phri/eval/silhouette.hpp"
#include "phri/model/trainer.hpp"

namespace phri::eval {

/// epoch,train_loss,val_action_mse,val_obs_mse; one row per epoch.
void write_curve_csv(const std::filesystem::path& path, const std::vector<model::EpochRecord>& curve);

/// Encoder means of every step of every sequence, stacked, with labels.
struct LatentSet {
  std::vector<std::string> trajectory;
  std::vector<int> step;
  std::vector<int> label;
  Eigen::MatrixXd points;  // rows: steps, cols: latent dims
};

LatentSet collect_latents(const model::PhriModel& model, const std::vector<model::Sequence>& sequences);

/// trajectory,t,label,condition,s_0..; one row per step.
void write_latent_csv(const std::filesystem::path& path, const LatentSet& latents);

/// Silhouette over condition labels plus centroid distances.
struct LatentMetrics {
  std::optional<double> silhouette;
  CentroidDistances centroids;
};

LatentMetrics latent_metrics(const LatentSet& latents);

/// label,silhouette then one row per centroid pair.
void write_latent_metrics_csv(const std::filesystem::path& path, const LatentMetrics& metrics);

}  // namespace phri::eval
