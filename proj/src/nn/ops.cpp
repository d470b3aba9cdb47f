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

#include "phri/nn/ops.hpp"

#include <cmath>
#include <string>

#include "phri/common/error.hpp"

namespace phri::nn {

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ParameterError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

void require_row(const Var& a, const Var& row, const char* op) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw ParameterError(std::string(op) + ": bad row operand");
}

template <typename Fn, typename Deriv>
Var unary(const Var& a, Fn fn, Deriv deriv) {
  Tape& t = a.tape();
  int ia = a.id();
  Matrix out = a.value().unaryExpr(fn);
  return t.make(std::move(out), {ia}, [ia, deriv](Tape& tape, int self) {
    if (!tape.needs_grad(ia)) return;
    const Matrix& x = tape.value(ia);
    const Matrix& y = tape.value(self);
    tape.grad_ref(ia) += tape.grad(self).cwiseProduct(x.binaryExpr(y, deriv));
  });
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) throw ParameterError("matmul: inner dimensions differ");
  Tape& t = a.tape();
  int ia = a.id(), ib = b.id();
  Matrix out(a.rows(), b.cols());
  out.noalias() = a.value() * b.value();
  return t.make(std::move(out), {ia, ib}, [ia, ib](Tape& tape, int self) {
    const Matrix& g = tape.grad(self);
    if (tape.needs_grad(ia)) tape.grad_ref(ia).noalias() += g * tape.value(ib).transpose();
    if (tape.needs_grad(ib)) tape.grad_ref(ib).noalias() += tape.value(ia).transpose() * g;
  });
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  int ia = a.id(), ib = b.id();
  return a.tape().make(a.value() + b.value(), {ia, ib}, [ia, ib](Tape& tape, int self) {
    if (tape.needs_grad(ia)) tape.grad_ref(ia) += tape.grad(self);
    if (tape.needs_grad(ib)) tape.grad_ref(ib) += tape.grad(self);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  int ia = a.id(), ib = b.id();
  return a.tape().make(a.value() - b.value(), {ia, ib}, [ia, ib](Tape& tape, int self) {
    if (tape.needs_grad(ia)) tape.grad_ref(ia) += tape.grad(self);
    if (tape.needs_grad(ib)) tape.grad_ref(ib) -= tape.grad(self);
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  int ia = a.id(), ib = b.id();
  return a.tape().make(a.value().cwiseProduct(b.value()), {ia, ib}, [ia, ib](Tape& tape, int self) {
    const Matrix& g = tape.grad(self);
    if (tape.needs_grad(ia)) tape.grad_ref(ia) += g.cwiseProduct(tape.value(ib));
    if (tape.needs_grad(ib)) tape.grad_ref(ib) += g.cwiseProduct(tape.value(ia));
  });
}

Var add_row(const Var& a, const Var& row) {
  require_row(a, row, "add_row");
  int ia = a.id(), ir = row.id();
  Matrix out = a.value().rowwise() + row.value().row(0);
  return a.tape().make(std::move(out), {ia, ir}, [ia, ir](Tape& tape, int self) {
    const Matrix& g = tape.grad(self);
    if (tape.needs_grad(ia)) tape.grad_ref(ia) += g;
    if (tape.needs_grad(ir)) tape.grad_ref(ir) += g.colwise().sum();
  });
}

Var mul_row(const Var& a, const Var& row) {
  require_row(a, row, "mul_row");
  int ia = a.id(), ir = row.id();
  Matrix out = a.value().array().rowwise() * row.value().row(0).array();
  return a.tape().make(std::move(out), {ia, ir}, [ia, ir](Tape& tape, int self) {
    const Matrix& g = tape.grad(self);
    if (tape.needs_grad(ia)) {
      tape.grad_ref(ia).array() += g.array().rowwise() * tape.value(ir).row(0).array();
    }
    if (tape.needs_grad(ir)) tape.grad_ref(ir) += g.cwiseProduct(tape.value(ia)).colwise().sum();
  });
}

Var scale(const Var& a, double factor) {
  int ia = a.id();
  return a.tape().make(a.value() * factor, {ia}, [ia, factor](Tape& tape, int self) {
    if (tape.needs_grad(ia)) tape.grad_ref(ia) += factor * tape.grad(self);
  });
}

Var add_scalar(const Var& a, double c) {
  int ia = a.id();
  return a.tape().make(a.value().array() + c, {ia}, [ia](Tape& tape, int self) {
    if (tape.needs_grad(ia)) tape.grad_ref(ia) += tape.grad(self);
  });
}

Var relu(const Var& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var softplus(const Var& a) {
  return unary(
      a, [](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); },
      [](double x, double) { return 1.0 / (1.0 + std::exp(-x)); });
}

Var exp(const Var& a) {
  return unary(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
  return unary(
      a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var square(const Var& a) {
  return unary(
      a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ParameterError("concat_cols: no operands");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  std::vector<int> ids;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw ParameterError("concat_cols: row counts differ");
    cols += p.cols();
    ids.push_back(p.id());
  }
  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return parts.front().tape().make(std::move(out), ids, [ids](Tape& tape, int self) {
    const Matrix& g = tape.grad(self);
    Eigen::Index off = 0;
    for (int id : ids) {
      const Eigen::Index c = tape.value(id).cols();
      if (tape.needs_grad(id)) tape.grad_ref(id) += g.middleCols(off, c);
      off += c;
    }
  });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw ParameterError("slice_cols: out of range");
  int ia = a.id();
  return a.tape().make(a.value().middleCols(start, count), {ia}, [ia, start, count](Tape& tape, int self) {
    if (tape.needs_grad(ia)) tape.grad_ref(ia).middleCols(start, count) += tape.grad(self);
  });
}

Var sum(const Var& a) {
  int ia = a.id();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape().make(std::move(out), {ia}, [ia](Tape& tape, int self) {
    if (tape.needs_grad(ia)) tape.grad_ref(ia).array() += tape.grad(self)(0, 0);
  });
}

Var row_sum(const Var& a) {
  int ia = a.id();
  Matrix out = a.value().rowwise().sum();
  return a.tape().make(std::move(out), {ia}, [ia](Tape& tape, int self) {
    if (!tape.needs_grad(ia)) return;
    Matrix& g = tape.grad_ref(ia);
    g.colwise() += tape.grad(self).col(0);
  });
}

Var weighted_sum(const Var& column, const Eigen::VectorXd& weights) {
  if (column.cols() != 1 || column.rows() != weights.size()) throw ParameterError("weighted_sum: shape mismatch");
  int ia = column.id();
  Matrix out(1, 1);
  out(0, 0) = column.value().col(0).dot(weights);
  return column.tape().make(std::move(out), {ia}, [ia, weights](Tape& tape, int self) {
    if (tape.needs_grad(ia)) tape.grad_ref(ia).col(0) += tape.grad(self)(0, 0) * weights;
  });
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  const Eigen::Index n = x.cols();
  if (n < 2) throw ParameterError("layer_norm needs at least two features");
  require_row(x, gain, "layer_norm gain");
  require_row(x, bias, "layer_norm bias");
  const Matrix& v = x.value();
  Eigen::VectorXd mean = v.rowwise().mean();
  Matrix centered = v.colwise() - mean;
  Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / static_cast<double>(n)) + eps).rsqrt().matrix();
  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix out = (xhat.array().rowwise() * gain.value().row(0).array()).rowwise() + bias.value().row(0).array();

  int ix = x.id(), ig = gain.id(), ib = bias.id();
  return x.tape().make(std::move(out), {ix, ig, ib},
                       [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& tape, int self) {
                         const Matrix& g = tape.grad(self);
                         if (tape.needs_grad(ig)) tape.grad_ref(ig) += g.cwiseProduct(xhat).colwise().sum();
                         if (tape.needs_grad(ib)) tape.grad_ref(ib) += g.colwise().sum();
                         if (!tape.needs_grad(ix)) return;
                         Matrix dxhat = g.array().rowwise() * tape.value(ig).row(0).array();
                         Eigen::VectorXd m1 = dxhat.rowwise().mean();
                         Eigen::VectorXd m2 = dxhat.cwiseProduct(xhat).rowwise().mean();
                         Matrix dx = (dxhat.colwise() - m1) - (xhat.array().colwise() * m2.array()).matrix();
                         tape.grad_ref(ix) += (dx.array().colwise() * inv_std.array()).matrix();
                       });
}

}  // namespace phri::nn
