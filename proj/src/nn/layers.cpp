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

#include "phri/nn/layers.hpp"

#include <cmath>

#include "phri/common/error.hpp"
#include "phri/nn/ops.hpp"

namespace phri::nn {

namespace {

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-bound, bound);
  }
  return m;
}

}  // namespace

Linear::Linear(ParameterSet& params, const std::string& name, int in, int out, Rng& rng) {
  if (in < 1 || out < 1) throw ParameterError("linear layer '" + name + "' needs positive sizes");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight_ = &params.add(name + ".weight", uniform_matrix(in, out, bound, rng));
  bias_ = &params.add(name + ".bias", uniform_matrix(1, out, bound, rng));
}

Var Linear::operator()(Tape& tape, const Var& x) const {
  if (x.cols() != weight_->value.rows()) {
    throw ParameterError("linear layer '" + weight_->name + "' expects " + std::to_string(weight_->value.rows()) +
                         " inputs, got " + std::to_string(x.cols()));
  }
  return add_row(matmul(x, tape.parameter(*weight_)), tape.parameter(*bias_));
}

LayerNorm::LayerNorm(ParameterSet& params, const std::string& name, int features) {
  gain_ = &params.add(name + ".gain", Matrix::Ones(1, features));
  bias_ = &params.add(name + ".bias", Matrix::Zero(1, features));
}

Var LayerNorm::operator()(Tape& tape, const Var& x) const {
  return layer_norm(x, tape.parameter(*gain_), tape.parameter(*bias_));
}

FcnStack::FcnStack(ParameterSet& params, const std::string& name, int in, int width, Rng& rng)
    : width_(width),
      l1_(params, name + ".fc1", in, width, rng),
      n1_(params, name + ".ln1", width),
      l2_(params, name + ".fc2", width, width, rng),
      n2_(params, name + ".ln2", width) {}

Var FcnStack::operator()(Tape& tape, const Var& x) const {
  Var h = relu(n1_(tape, l1_(tape, x)));
  return relu(n2_(tape, l2_(tape, h)));
}

NormalHead::NormalHead(ParameterSet& params, const std::string& name, int in, int out, Rng& rng)
    : mean_(params, name + ".mean", in, out, rng), scale_(params, name + ".scale", in, out, rng) {}

DiagNormal NormalHead::operator()(Tape& tape, const Var& features) const {
  return {mean_(tape, features), positive(scale_(tape, features))};
}

StudentTHead::StudentTHead(ParameterSet& params, const std::string& name, int in, int out, Rng& rng,
                           double initial_dof)
    : loc_(params, name + ".loc", in, out, rng), scale_(params, name + ".scale", in, out, rng) {
  dof_pre_ = &params.add(name + ".dof", Matrix::Constant(1, out, positive_inverse(initial_dof)));
}

DiagStudentT StudentTHead::operator()(Tape& tape, const Var& features) const {
  return {loc_(tape, features), positive(scale_(tape, features)), positive(tape.parameter(*dof_pre_))};
}

}  // namespace phri::nn
