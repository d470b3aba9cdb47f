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

#include "phri/nn/optimizer.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "phri/common/binary_io.hpp"
#include "phri/common/error.hpp"

namespace phri::nn {

namespace {

constexpr char kMagic[] = "PHRI-NN";
constexpr std::uint32_t kVersion = 1;

void write_matrix(std::ostream& out, const Matrix& m) {
  io::write_u64(out, static_cast<std::uint64_t>(m.rows()));
  io::write_u64(out, static_cast<std::uint64_t>(m.cols()));
  io::write_f64_array(out, m.data(), static_cast<std::size_t>(m.size()));
}

Matrix read_matrix(std::istream& in) {
  auto rows = io::read_u64(in);
  auto cols = io::read_u64(in);
  if (rows > (1ULL << 24) || cols > (1ULL << 24)) throw IoError("corrupt checkpoint matrix header");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  io::read_f64_array(in, m.data(), static_cast<std::size_t>(m.size()));
  return m;
}

}  // namespace

AmsGrad::AmsGrad(const ParameterSet& params, AmsGradOptions options) : options_(options) {
  if (!(options.lr > 0.0)) throw ParameterError("learning rate must be positive");
  slots_.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = params[i].value;
    slots_.push_back(Slot{Matrix::Zero(v.rows(), v.cols()), Matrix::Zero(v.rows(), v.cols()),
                          Matrix::Zero(v.rows(), v.cols()), 0});
  }
}

void AmsGrad::set_lr(double lr) {
  if (!(lr > 0.0)) throw ParameterError("learning rate must be positive");
  options_.lr = lr;
}

std::vector<std::string> AmsGrad::step(ParameterSet& params) {
  if (params.size() != slots_.size()) throw ParameterError("optimizer built for a different parameter set");
  std::vector<std::string> skipped;
  const double b1 = options_.beta1, b2 = options_.beta2;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    Slot& s = slots_[i];
    if (!p.grad.allFinite()) {
      skipped.push_back(p.name);
      continue;
    }
    ++s.steps;
    s.m = b1 * s.m + (1.0 - b1) * p.grad;
    s.v = b2 * s.v + (1.0 - b2) * p.grad.cwiseAbs2();
    s.v_max = s.v_max.cwiseMax(s.v);
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(s.steps));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(s.steps));
    Matrix denom = (s.v_max.array() / c2).sqrt() + options_.eps;
    p.value.array() -= (options_.lr / c1) * s.m.array() / denom.array();
  }
  return skipped;
}

double gradient_norm(const ParameterSet& params) {
  double sq = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) sq += params[i].grad.squaredNorm();
  return std::sqrt(sq);
}

double clip_gradient_norm(ParameterSet& params, double max_norm) {
  const double norm = gradient_norm(params);
  if (std::isfinite(norm) && norm > max_norm) {
    const double factor = max_norm / norm;
    for (std::size_t i = 0; i < params.size(); ++i) params[i].grad *= factor;
  }
  return norm;
}

void save_checkpoint(std::ostream& out, const ParameterSet& params, const AmsGrad& optimizer) {
  out.write(kMagic, sizeof(kMagic));
  io::write_u32(out, kVersion);
  const auto& opts = optimizer.options();
  io::write_f64(out, opts.lr);
  io::write_f64(out, opts.beta1);
  io::write_f64(out, opts.beta2);
  io::write_f64(out, opts.eps);
  io::write_u64(out, params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& slot = optimizer.slots()[i];
    io::write_string(out, params[i].name);
    write_matrix(out, params[i].value);
    write_matrix(out, slot.m);
    write_matrix(out, slot.v);
    write_matrix(out, slot.v_max);
    io::write_u64(out, static_cast<std::uint64_t>(slot.steps));
  }
  if (!out) throw IoError("failed to write checkpoint");
}

void load_checkpoint(std::istream& in, ParameterSet& params, AmsGrad& optimizer) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(kMagic));
  if (in.gcount() != sizeof(kMagic) || std::string(magic, sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw IoError("not a parameter checkpoint");
  }
  const auto version = io::read_u32(in);
  if (version != kVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  AmsGradOptions opts;
  opts.lr = io::read_f64(in);
  opts.beta1 = io::read_f64(in);
  opts.beta2 = io::read_f64(in);
  opts.eps = io::read_f64(in);
  const auto count = io::read_u64(in);
  if (count != params.size()) throw IoError("checkpoint parameter count does not match the model");
  AmsGrad restored(params, opts);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto name = io::read_string(in);
    Parameter* p = params.find(name);
    if (p == nullptr || p != &params[i]) throw IoError("checkpoint parameter '" + name + "' does not match the model");
    Matrix value = read_matrix(in);
    if (value.rows() != p->value.rows() || value.cols() != p->value.cols()) {
      throw IoError("checkpoint parameter '" + name + "' has the wrong shape");
    }
    p->value = std::move(value);
    auto& slot = restored.slots()[i];
    slot.m = read_matrix(in);
    slot.v = read_matrix(in);
    slot.v_max = read_matrix(in);
    slot.steps = static_cast<std::int64_t>(io::read_u64(in));
  }
  optimizer = std::move(restored);
}

}  // namespace phri::nn
