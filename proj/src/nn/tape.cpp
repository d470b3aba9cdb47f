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

#include "phri/nn/tape.hpp"

#include <cmath>

#include "phri/common/error.hpp"

namespace phri::nn {

Parameter& ParameterSet::add(std::string name, Matrix init) {
  if (find(name) != nullptr) throw ParameterError("duplicate parameter name '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = std::move(name);
  p->value = std::move(init);
  p->zero_grad();
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter* ParameterSet::find(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

const Parameter* ParameterSet::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), nullptr, nullptr, false});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::parameter(Parameter& p) {
  nodes_.push_back(Node{Matrix(), Matrix(), nullptr, &p, true});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::make(Matrix value, std::vector<int> parents, Backward backward) {
  bool needs = false;
  for (int id : parents) needs = needs || nodes_[static_cast<std::size_t>(id)].needs_grad;
  nodes_.push_back(Node{std::move(value), Matrix(), needs ? std::move(backward) : nullptr, nullptr, needs});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Matrix& Tape::grad_ref(int id) {
  auto& node = nodes_[static_cast<std::size_t>(id)];
  if (node.grad.size() == 0) {
    const Matrix& v = value(id);
    node.grad.setZero(v.rows(), v.cols());
  }
  return node.grad;
}

void Tape::backward(const Var& loss) {
  const Matrix& v = loss.value();
  if (v.rows() != 1 || v.cols() != 1) throw ParameterError("backward expects a scalar loss");
  if (!std::isfinite(v(0, 0))) throw NumericError("non-finite loss");
  grad_ref(loss.id()).setOnes();
  for (int id = loss.id(); id >= 0; --id) {
    auto& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.needs_grad || node.grad.size() == 0) continue;
    if (node.param != nullptr) {
      node.param->grad += node.grad;
    } else if (node.backward) {
      node.backward(*this, id);
    }
  }
}

}  // namespace phri::nn
