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

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phri/model/model.hpp"
#include "phri/nn/optimizer.hpp"
#include "phri/sim/dataset.hpp"

namespace phri::model {

/// A trajectory as the model sees it: observations and actions both
/// standardized. action_mean/action_scale map actions back to data units
/// (empty means they already are).
struct Sequence {
  std::string id;
  Matrix obs;               // T x obs_dim
  Matrix action;            // T x action_dim
  std::vector<int> labels;  // per-step condition index
  Eigen::RowVectorXd action_mean;
  Eigen::RowVectorXd action_scale;

  Eigen::Index steps() const { return obs.rows(); }
  Eigen::RowVectorXd action_in_data_units(const Eigen::RowVectorXd& a) const;
};

/// Standardizes one split of a dataset with the statistics in its manifest.
std::vector<Sequence> make_sequences(const sim::Dataset& dataset, const std::string& split);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // population standard deviation
};

Summary summarize(std::vector<double> values);

/// One-step-ahead errors over a set of trajectories. Each trajectory's MSE is
/// the mean squared error over its transitions and dimensions. Observations
/// are scored standardized, actions in data units. Without explicit dynamics
/// the action prediction is the all-ones vector in data units.
struct MseReport {
  std::vector<double> action_per_trajectory;
  std::vector<double> obs_per_trajectory;
  Summary action;
  Summary obs;
};

MseReport evaluate(const PhriModel& model, const std::vector<Sequence>& sequences);

/// Encoder means along a trajectory (T x latent_dim), histories advanced
/// with those means and the dataset actions.
Matrix encode_latent(const PhriModel& model, const Sequence& sequence);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_action_mse = 0.0;
  double val_obs_mse = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> curve;
  bool aborted = false;  // a non-finite loss stopped training; parameters hold the last good state
  std::string message;
};

struct TrainOptions {
  int chunk_steps = 50;  // time steps per graph; bounds memory for long trajectories
  // Take an optimizer step after every chunk instead of once per batch
  // (truncated backpropagation). More updates per epoch on short runs.
  bool step_per_chunk = false;
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Fits the model with AMSGrad over whole-trajectory batches. Deterministic
/// given the model seed.
TrainResult train(PhriModel& model, nn::AmsGrad& optimizer, const std::vector<Sequence>& train_set,
                  const std::vector<Sequence>& val_set, const TrainOptions& options = {});

/// Loss of one batch of trajectories, gradients accumulated into the model
/// parameters (not zeroed first). Exposed for tests.
LossTerms accumulate_batch_gradient(PhriModel& model, const std::vector<const Sequence*>& batch, Rng& noise,
                                    int chunk_steps, const std::function<void()>& after_chunk = {});

}  // namespace phri::model
