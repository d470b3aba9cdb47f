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

#include <memory>
#include <span>

#include <Eigen/Dense>

#include "phri/common/random.hpp"
#include "phri/crc/reservoir.hpp"
#include "phri/model/config.hpp"
#include "phri/nn/distributions.hpp"
#include "phri/nn/layers.hpp"
#include "phri/nn/tape.hpp"

namespace phri::model {

using nn::Matrix;
using nn::Tape;
using nn::Var;

/// One row per transition (o_t, a_t) -> o_{t+1}. The history readouts are
/// the reservoir states before step t and enter the graph as constants.
struct RowBatch {
  Matrix obs;        // n x obs_dim
  Matrix action;     // n x action_dim
  Matrix next_obs;   // n x obs_dim
  Matrix readout_s;  // n x n_rc
  Matrix readout_a;  // n x n_rc
  Matrix noise_s;    // n x latent_dim, standard normal
  Matrix noise_a;    // n x action_dim, standard normal
  Eigen::VectorXd weight;  // per-row loss weight

  Eigen::Index rows() const { return obs.rows(); }
};

/// Weighted loss contributions, already multiplied by their beta and gated
/// by the ablation flags. total() is their plain sum.
struct LossTerms {
  double reconstruction = 0.0;
  double kl_state = 0.0;
  double kl_policy = 0.0;
  double auxiliary = 0.0;

  double total() const { return reconstruction + kl_state + kl_policy + auxiliary; }
  LossTerms& operator+=(const LossTerms& o);
};

struct LossGraph {
  Var loss;
  LossTerms terms;
  Var state;       // s_t sample
  Var action;      // the action fed to the dynamics (invalid without dynamics)
  Var next_state;  // latent the decoder reads
};

struct Histories {
  crc::ReservoirState s;
  crc::ReservoirState a;
};

/// Mean-path predictions for a block of rows.
struct Prediction {
  Matrix state;     // encoder mean
  Matrix action;    // policy mean, or all ones without explicit dynamics
  Matrix next_obs;  // decoder location
};

class PhriModel {
 public:
  explicit PhriModel(const ModelConfig& config);

  /// Rebuilds a model around saved reservoirs (checkpoint loading).
  PhriModel(const ModelConfig& config, crc::ReservoirParams state_reservoir, crc::ReservoirParams action_reservoir);

  ~PhriModel();

  PhriModel(const PhriModel&) = delete;
  PhriModel& operator=(const PhriModel&) = delete;

  const ModelConfig& config() const { return config_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  const crc::ReservoirParams& state_reservoir() const { return res_s_; }
  const crc::ReservoirParams& action_reservoir() const { return res_a_; }

  // Graph pieces; rows are samples.
  Var project_state_history(Tape& tape, const Var& readout) const;
  Var project_action_history(Tape& tape, const Var& readout) const;
  nn::DiagNormal encode_state(Tape& tape, const Var& obs, const Var& history) const;
  nn::DiagNormal prior_state(Tape& tape, const Var& history) const;
  nn::DiagNormal policy(Tape& tape, const Var& state, const Var& history) const;
  nn::DiagNormal prior_action(Tape& tape, const Var& history) const;
  Var dynamics(Tape& tape, const Var& state, const Var& action) const;
  nn::DiagStudentT decode(Tape& tape, const Var& state) const;

  /// Builds the weighted training loss over a block of rows.
  LossGraph loss(Tape& tape, const RowBatch& rows) const;

  /// Encoder sample (or mean when history_from_mean is set) used to advance h_s.
  Matrix history_state(const Matrix& obs, const Matrix& readout_s, const Matrix& noise_s) const;

  Prediction predict(const Matrix& obs, const Matrix& readout_s, const Matrix& readout_a) const;

  Histories initial_histories() const;
  void step_histories(Histories& h, std::span<const double> state, std::span<const double> action) const;

 private:
  void build();

  ModelConfig config_;
  crc::ReservoirParams res_s_;
  crc::ReservoirParams res_a_;
  nn::ParameterSet params_;
  Rng init_rng_;

  struct Modules;
  std::unique_ptr<Modules> m_;
};

/// Reservoir construction options shared by the model and its tests.
crc::ReservoirOptions reservoir_options(const ModelConfig& config, bool for_actions);

}  // namespace phri::model
