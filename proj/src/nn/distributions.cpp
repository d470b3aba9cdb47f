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

#include "phri/nn/distributions.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>

#include "phri/common/error.hpp"
#include "phri/nn/ops.hpp"

namespace phri::nn {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

void require_same(const Var& a, const Var& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ParameterError(std::string(what) + ": dimension mismatch");
}

void require_positive(const Matrix& m, const char* what) {
  if (!(m.array() > 0.0).all()) throw ParameterError(std::string(what) + " must be strictly positive");
}

}  // namespace

Var positive(const Var& pre) { return add_scalar(softplus(pre), kPositiveFloor); }

double positive_inverse(double target) {
  double y = target - kPositiveFloor;
  if (!(y > 0.0)) throw ParameterError("positive_inverse: target below floor");
  return y > 30.0 ? y : std::log(std::expm1(y));
}

Var reparameterized_sample(const DiagNormal& d, const Var& noise) {
  require_same(d.mean, noise, "reparameterized_sample");
  return add(d.mean, mul(d.scale, noise));
}

Var log_prob(const DiagNormal& d, const Var& x) {
  require_same(d.mean, x, "normal log_prob");
  require_same(d.scale, x, "normal log_prob");
  require_positive(d.scale.value(), "normal scale");
  const Matrix& mu = d.mean.value();
  const Matrix& sigma = d.scale.value();
  Matrix z = (x.value() - mu).cwiseQuotient(sigma);
  Matrix out = (-0.5 * z.array().square() - sigma.array().log() - kHalfLog2Pi).rowwise().sum();

  int ix = x.id(), im = d.mean.id(), is = d.scale.id();
  return x.tape().make(std::move(out), {ix, im, is}, [ix, im, is, z = std::move(z)](Tape& tape, int self) {
    const Eigen::VectorXd g = tape.grad(self).col(0);
    const Matrix& sigma = tape.value(is);
    Matrix dz = z.cwiseQuotient(sigma);  // d/dmu
    if (tape.needs_grad(ix)) tape.grad_ref(ix) -= (dz.array().colwise() * g.array()).matrix();
    if (tape.needs_grad(im)) tape.grad_ref(im) += (dz.array().colwise() * g.array()).matrix();
    if (tape.needs_grad(is)) {
      Matrix ds = (z.array().square() - 1.0) / sigma.array();
      tape.grad_ref(is) += (ds.array().colwise() * g.array()).matrix();
    }
  });
}

Var log_prob(const DiagStudentT& d, const Var& x) {
  require_same(d.loc, x, "student-t log_prob");
  require_same(d.scale, x, "student-t log_prob");
  const bool shared_dof = d.dof.rows() == 1 && x.rows() != 1;
  if (d.dof.cols() != x.cols() || (!shared_dof && d.dof.rows() != x.rows())) {
    throw ParameterError("student-t log_prob: dof dimension mismatch");
  }
  require_positive(d.scale.value(), "student-t scale");
  require_positive(d.dof.value(), "student-t dof");

  const Eigen::Index n = x.rows(), m = x.cols();
  const Matrix& sigma = d.scale.value();
  Matrix nu = shared_dof ? Matrix(d.dof.value().replicate(n, 1)) : d.dof.value();
  Matrix z = (x.value() - d.loc.value()).cwiseQuotient(sigma);
  Matrix out = Matrix::Zero(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double v = nu(i, j);
      acc += std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) - 0.5 * std::log(v * std::numbers::pi) -
             std::log(sigma(i, j)) - 0.5 * (v + 1.0) * std::log1p(z(i, j) * z(i, j) / v);
    }
    out(i, 0) = acc;
  }

  int ix = x.id(), il = d.loc.id(), is = d.scale.id(), id = d.dof.id();
  return x.tape().make(
      std::move(out), {ix, il, is, id},
      [ix, il, is, id, shared_dof, z = std::move(z), nu = std::move(nu)](Tape& tape, int self) {
        const Eigen::VectorXd g = tape.grad(self).col(0);
        const Matrix& sigma = tape.value(is);
        const Eigen::Index n = z.rows(), m = z.cols();
        Matrix d_loc(n, m), d_scale(n, m), d_dof(n, m);
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < m; ++j) {
            const double v = nu(i, j), zz = z(i, j), s = sigma(i, j);
            const double denom = v + zz * zz;
            d_loc(i, j) = g[i] * (v + 1.0) * zz / (s * denom);
            d_scale(i, j) = g[i] * (-1.0 / s + (v + 1.0) * zz * zz / (s * denom));
            d_dof(i, j) = g[i] * (0.5 * boost::math::digamma(0.5 * (v + 1.0)) - 0.5 * boost::math::digamma(0.5 * v) -
                                  0.5 / v - 0.5 * std::log1p(zz * zz / v) + 0.5 * (v + 1.0) * zz * zz / (v * denom));
          }
        }
        if (tape.needs_grad(ix)) tape.grad_ref(ix) -= d_loc;
        if (tape.needs_grad(il)) tape.grad_ref(il) += d_loc;
        if (tape.needs_grad(is)) tape.grad_ref(is) += d_scale;
        if (tape.needs_grad(id)) {
          if (shared_dof) {
            tape.grad_ref(id) += d_dof.colwise().sum();
          } else {
            tape.grad_ref(id) += d_dof;
          }
        }
      });
}

Var kl_diag_normal(const DiagNormal& q, const DiagNormal& p) {
  require_same(q.mean, p.mean, "kl_diag_normal");
  require_same(q.scale, p.scale, "kl_diag_normal");
  require_same(q.mean, q.scale, "kl_diag_normal");
  require_positive(q.scale.value(), "kl q scale");
  require_positive(p.scale.value(), "kl p scale");
  const Matrix& mq = q.mean.value();
  const Matrix& sq = q.scale.value();
  const Matrix& mp = p.mean.value();
  const Matrix& sp = p.scale.value();
  Matrix diff = mq - mp;
  Matrix vp = sp.array().square();
  Matrix terms = (sp.array() / sq.array()).log() + (sq.array().square() + diff.array().square()) / (2.0 * vp.array()) - 0.5;
  Matrix out = terms.rowwise().sum();

  int imq = q.mean.id(), isq = q.scale.id(), imp = p.mean.id(), isp = p.scale.id();
  return q.mean.tape().make(
      std::move(out), {imq, isq, imp, isp},
      [imq, isq, imp, isp, diff = std::move(diff), vp = std::move(vp)](Tape& tape, int self) {
        const Eigen::VectorXd g = tape.grad(self).col(0);
        const Matrix& sq = tape.value(isq);
        const Matrix& sp = tape.value(isp);
        Matrix dmean = diff.cwiseQuotient(vp);
        if (tape.needs_grad(imq)) tape.grad_ref(imq) += (dmean.array().colwise() * g.array()).matrix();
        if (tape.needs_grad(imp)) tape.grad_ref(imp) -= (dmean.array().colwise() * g.array()).matrix();
        if (tape.needs_grad(isq)) {
          Matrix ds = -sq.array().inverse() + sq.array() / vp.array();
          tape.grad_ref(isq) += (ds.array().colwise() * g.array()).matrix();
        }
        if (tape.needs_grad(isp)) {
          Matrix ds = sp.array().inverse() - (sq.array().square() + diff.array().square()) / (vp.array() * sp.array());
          tape.grad_ref(isp) += (ds.array().colwise() * g.array()).matrix();
        }
      });
}

}  // namespace phri::nn
