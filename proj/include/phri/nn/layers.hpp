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

#include <string>

#include "phri/common/random.hpp"
#include "phri/nn/distributions.hpp"
#include "phri/nn/tape.hpp"

namespace phri::nn {

/// y = x W + b with W drawn uniformly in +-1/sqrt(fan_in).
class Linear {
 public:
  Linear(ParameterSet& params, const std::string& name, int in, int out, Rng& rng);

  Var operator()(Tape& tape, const Var& x) const;

  int in_features() const { return static_cast<int>(weight_->value.rows()); }
  int out_features() const { return static_cast<int>(weight_->value.cols()); }

 private:
  Parameter* weight_;
  Parameter* bias_;
};

class LayerNorm {
 public:
  LayerNorm(ParameterSet& params, const std::string& name, int features);

  Var operator()(Tape& tape, const Var& x) const;

 private:
  Parameter* gain_;
  Parameter* bias_;
};

/// Two hidden layers, each affine -> LayerNorm -> ReLU.
class FcnStack {
 public:
  static constexpr int kDefaultWidth = 100;

  FcnStack(ParameterSet& params, const std::string& name, int in, int width, Rng& rng);

  Var operator()(Tape& tape, const Var& x) const;

  int width() const { return width_; }

 private:
  int width_;
  Linear l1_;
  LayerNorm n1_;
  Linear l2_;
  LayerNorm n2_;
};

/// Affine mean and positive scale heads.
class NormalHead {
 public:
  NormalHead(ParameterSet& params, const std::string& name, int in, int out, Rng& rng);

  DiagNormal operator()(Tape& tape, const Var& features) const;

 private:
  Linear mean_;
  Linear scale_;
};

/// Affine location and scale heads plus a learned per-dimension dof.
class StudentTHead {
 public:
  StudentTHead(ParameterSet& params, const std::string& name, int in, int out, Rng& rng,
               double initial_dof = 10.0);

  DiagStudentT operator()(Tape& tape, const Var& features) const;

 private:
  Linear loc_;
  Linear scale_;
  Parameter* dof_pre_;
};

}  // namespace phri::nn
