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

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "phri/common/error.hpp"
#include "phri/common/random.hpp"
#include "phri/nn/distributions.hpp"
#include "phri/nn/layers.hpp"
#include "phri/nn/ops.hpp"
#include "phri/nn/optimizer.hpp"

namespace phri::nn {
namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

double normal_logpdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double student_logpdf(double x, double mu, double sigma, double nu) {
  const double z = (x - mu) / sigma;
  return std::lgamma(0.5 * (nu + 1)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi) -
         std::log(sigma) - 0.5 * (nu + 1) * std::log1p(z * z / nu);
}

// Composite Simpson over u in (-pi/2, pi/2) with x = mu + sigma tan(u).
template <typename Density>
double integrate_real_line(Density density, double mu, double sigma, int intervals = 200000) {
  const double a = -std::numbers::pi / 2.0, b = std::numbers::pi / 2.0;
  const double h = (b - a) / intervals;
  auto f = [&](double u) {
    if (std::abs(std::abs(u) - std::numbers::pi / 2.0) < 1e-15) return 0.0;
    const double c = std::cos(u);
    return density(mu + sigma * std::tan(u)) * sigma / (c * c);
  };
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

TEST(Tape, SquareGradient) {
  ParameterSet params;
  Parameter& x = params.add("x", Matrix::Constant(1, 1, 3.0));
  Tape tape;
  tape.backward(sum(square(tape.parameter(x))));
  EXPECT_DOUBLE_EQ(x.grad(0, 0), 6.0);
}

TEST(Tape, UnreachableParameterGetsZero) {
  ParameterSet params;
  Parameter& x = params.add("x", Matrix::Constant(2, 2, 1.5));
  Parameter& unused = params.add("unused", Matrix::Constant(2, 2, -4.0));
  params.zero_grad();
  Tape tape;
  Var y = tape.parameter(unused);
  (void)y;
  tape.backward(sum(exp(tape.parameter(x))));
  EXPECT_EQ(unused.grad.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(x.grad(0, 0), std::exp(1.5), 1e-12);
}

TEST(Tape, NonFiniteLossThrows) {
  ParameterSet params;
  Parameter& x = params.add("x", Matrix::Constant(1, 1, -1.0));
  Tape tape;
  EXPECT_THROW(tape.backward(sum(log(tape.parameter(x)))), NumericError);
  Tape tape2;
  EXPECT_THROW(tape2.backward(tape2.parameter(params.add("m", Matrix::Ones(2, 2)))), ParameterError);
}

TEST(Tape, SharedSubexpressionAccumulates) {
  ParameterSet params;
  Parameter& x = params.add("x", Matrix::Constant(1, 1, 2.0));
  Tape tape;
  Var v = tape.parameter(x);
  Var y = mul(v, v);
  tape.backward(sum(add(y, scale(v, 3.0))));
  EXPECT_DOUBLE_EQ(x.grad(0, 0), 7.0);
}

TEST(GradCheck, FiveLayerComposition) {
  Rng rng(17);
  ParameterSet params;
  Linear a(params, "a", 4, 6, rng);
  LayerNorm n(params, "n", 6);
  Linear b(params, "b", 6, 5, rng);
  Linear c(params, "c", 5, 3, rng);
  Parameter& row = params.add("row", random_matrix(1, 3, rng));
  Matrix input = random_matrix(7, 4, rng);
  auto loss = [&](Tape& t) {
    Var x = t.constant(input);
    Var h = softplus(n(t, a(t, x)));
    h = relu(b(t, h));
    h = mul_row(c(t, h), t.parameter(row));
    Var parts = concat_cols({h, slice_cols(h, 1, 2)});
    return sum(square(add_scalar(parts, 0.3)));
  };
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t k = 0; k < params.size(); ++k) params[k].value = random_matrix(params[k].value.rows(), params[k].value.cols(), rng);
    auto r = testing::grad_check(params, loss);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_name << " analytic " << r.worst_analytic << " numeric " << r.worst_numeric;
  }
}

TEST(GradCheck, DistributionsAndDivergences) {
  Rng rng(23);
  ParameterSet params;
  Parameter& x = params.add("x", Matrix());
  Parameter& m1 = params.add("m1", Matrix());
  Parameter& s1 = params.add("s1", Matrix());
  Parameter& m2 = params.add("m2", Matrix());
  Parameter& s2 = params.add("s2", Matrix());
  Parameter& dof = params.add("dof", Matrix());
  Parameter& dof_full = params.add("dof_full", Matrix());
  Matrix weights_noise;
  auto loss = [&](Tape& t) {
    DiagNormal q{t.parameter(m1), positive(t.parameter(s1))};
    DiagNormal p{t.parameter(m2), positive(t.parameter(s2))};
    DiagStudentT st{t.parameter(m1), positive(t.parameter(s2)), positive(t.parameter(dof))};
    DiagStudentT st2{t.parameter(m2), positive(t.parameter(s1)), positive(t.parameter(dof_full))};
    Var xs = t.parameter(x);
    Var sample = reparameterized_sample(q, t.constant(weights_noise));
    Var total = add(add(kl_diag_normal(q, p), log_prob(p, xs)), add(log_prob(st, xs), log_prob(st2, sample)));
    return sum(total);
  };
  for (int trial = 0; trial < 20; ++trial) {
    x.value = random_matrix(4, 3, rng, -2, 2);
    m1.value = random_matrix(4, 3, rng);
    s1.value = random_matrix(4, 3, rng);
    m2.value = random_matrix(4, 3, rng);
    s2.value = random_matrix(4, 3, rng);
    dof.value = random_matrix(1, 3, rng, 0.0, 4.0);
    dof_full.value = random_matrix(4, 3, rng, 0.0, 4.0);
    weights_noise = random_matrix(4, 3, rng, -2, 2);
    auto r = testing::grad_check(params, loss);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_name << " analytic " << r.worst_analytic << " numeric " << r.worst_numeric;
  }
}

TEST(LayerNorm, Examples) {
  Tape t;
  Var gain = t.constant(Matrix::Ones(1, 4));
  Var bias = t.constant(Matrix::Zero(1, 4));
  Var y = layer_norm(t.constant(Matrix::Constant(1, 4, 2.5)), gain, bias);
  EXPECT_EQ(y.value().cwiseAbs().maxCoeff(), 0.0);

  Var g2 = t.constant(Matrix::Ones(1, 2));
  Var b2 = t.constant(Matrix::Zero(1, 2));
  Matrix x(1, 2);
  x << -1.0, 1.0;
  Var z = layer_norm(t.constant(x), g2, b2);
  EXPECT_NEAR(z.value()(0, 0), -1.0 / std::sqrt(1.0 + 1e-5), 1e-15);
  EXPECT_NEAR(z.value()(0, 1), 1.0 / std::sqrt(1.0 + 1e-5), 1e-15);

  Rng rng(1);
  Var r = layer_norm(t.constant(random_matrix(1, 50, rng, -3, 7)), t.constant(Matrix::Ones(1, 50)),
                     t.constant(Matrix::Zero(1, 50)));
  const auto& v = r.value();
  EXPECT_NEAR(v.mean(), 0.0, 1e-12);
  EXPECT_NEAR((v.array() - v.mean()).square().mean(), 1.0, 1e-3);

  EXPECT_THROW(layer_norm(t.constant(Matrix::Ones(3, 1)), t.constant(Matrix::Ones(1, 1)),
                          t.constant(Matrix::Zero(1, 1))),
               ParameterError);
}

TEST(KlDiagNormal, Examples) {
  Tape t;
  DiagNormal q{t.constant(Matrix::Zero(1, 2)), t.constant(Matrix::Ones(1, 2))};
  EXPECT_NEAR(kl_diag_normal(q, q).value()(0, 0), 0.0, 1e-15);
  DiagNormal p{t.constant(Matrix::Ones(1, 1)), t.constant(Matrix::Ones(1, 1))};
  DiagNormal q1{t.constant(Matrix::Zero(1, 1)), t.constant(Matrix::Ones(1, 1))};
  EXPECT_NEAR(kl_diag_normal(q1, p).value()(0, 0), 0.5, 1e-15);
  DiagNormal bad{t.constant(Matrix::Zero(1, 3)), t.constant(Matrix::Ones(1, 3))};
  EXPECT_THROW(kl_diag_normal(q, bad), ParameterError);
}

TEST(KlDiagNormal, MatchesMonteCarlo) {
  // N(0, 2^2) vs N(0, 1) per dimension.
  Tape t;
  DiagNormal q{t.constant(Matrix::Zero(1, 1)), t.constant(Matrix::Constant(1, 1, 2.0))};
  DiagNormal p{t.constant(Matrix::Zero(1, 1)), t.constant(Matrix::Ones(1, 1))};
  const double closed = kl_diag_normal(q, p).value()(0, 0);
  Rng rng(2024);
  const int n = 1000000;
  double mean = 0.0, m2 = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double x = 2.0 * rng.normal();
    const double v = normal_logpdf(x, 0.0, 2.0) - normal_logpdf(x, 0.0, 1.0);
    const double d = v - mean;
    mean += d / i;
    m2 += d * (v - mean);
  }
  const double se = std::sqrt(m2 / (n - 1) / n);
  EXPECT_NEAR(closed, mean, 3.0 * se);
}

TEST(KlDiagNormal, NonNegativeAndZeroOnlyWhenEqual) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Tape t;
    Matrix mq = random_matrix(1, 3, rng), mp = random_matrix(1, 3, rng);
    Matrix sq = random_matrix(1, 3, rng, 0.1, 3), sp = random_matrix(1, 3, rng, 0.1, 3);
    DiagNormal q{t.constant(mq), t.constant(sq)};
    DiagNormal p{t.constant(mp), t.constant(sp)};
    EXPECT_GE(kl_diag_normal(q, p).value()(0, 0), 0.0);
    EXPECT_NEAR(kl_diag_normal(q, q).value()(0, 0), 0.0, 1e-12);
  }
}

TEST(ReparameterizedSample, Examples) {
  Tape t;
  Matrix mu(1, 2);
  mu << 0.4, -1.2;
  DiagNormal d{t.constant(mu), t.constant(Matrix::Constant(1, 2, 0.7))};
  EXPECT_EQ(reparameterized_sample(d, t.constant(Matrix::Zero(1, 2))).value(), mu);
  DiagNormal collapsed{t.constant(mu), t.constant(Matrix::Zero(1, 2))};
  EXPECT_EQ(reparameterized_sample(collapsed, t.constant(Matrix::Constant(1, 2, 3.3))).value(), mu);
}

TEST(ReparameterizedSample, EmpiricalMean) {
  Rng rng(8);
  const int n = 100000;
  Matrix noise(n, 1);
  for (int i = 0; i < n; ++i) noise(i, 0) = rng.normal();
  Tape t;
  DiagNormal d{t.constant(Matrix::Constant(n, 1, 1.3)), t.constant(Matrix::Constant(n, 1, 0.5))};
  const double mean = reparameterized_sample(d, t.constant(noise)).value().mean();
  EXPECT_NEAR(mean, 1.3, 4.0 * 0.5 / std::sqrt(n));
}

TEST(LogProb, StandardNormalAtZero) {
  Tape t;
  DiagNormal d{t.constant(Matrix::Zero(1, 3)), t.constant(Matrix::Ones(1, 3))};
  EXPECT_NEAR(log_prob(d, t.constant(Matrix::Zero(1, 3))).value()(0, 0), -1.5 * std::log(2.0 * std::numbers::pi),
              1e-14);
  DiagNormal bad{t.constant(Matrix::Zero(1, 3)), t.constant(Matrix::Constant(1, 3, -1.0))};
  EXPECT_THROW(log_prob(bad, t.constant(Matrix::Zero(1, 3))), ParameterError);
}

TEST(LogProb, StudentTApproachesNormalAtHighDof) {
  Tape t;
  const double normal = normal_logpdf(0.0, 0.0, 1.0);
  double previous_gap = INFINITY;
  for (double dof : {10.0, 1e3, 1e6}) {
    DiagStudentT d{t.constant(Matrix::Zero(1, 1)), t.constant(Matrix::Ones(1, 1)), t.constant(Matrix::Constant(1, 1, dof))};
    const double gap = std::abs(log_prob(d, t.constant(Matrix::Zero(1, 1))).value()(0, 0) - normal);
    EXPECT_LT(gap, previous_gap);
    previous_gap = gap;
  }
  EXPECT_LT(previous_gap, 1e-6);
}

TEST(LogProb, StudentTMatchesReferenceFormula) {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform(-4, 4), mu = rng.uniform(-1, 1), s = rng.uniform(0.2, 2), nu = rng.uniform(0.5, 40);
    Tape t;
    DiagStudentT d{t.constant(Matrix::Constant(1, 1, mu)), t.constant(Matrix::Constant(1, 1, s)),
                   t.constant(Matrix::Constant(1, 1, nu))};
    EXPECT_NEAR(log_prob(d, t.constant(Matrix::Constant(1, 1, x))).value()(0, 0), student_logpdf(x, mu, s, nu), 1e-12);
  }
}

TEST(LogProb, DensitiesIntegrateToOne) {
  Rng rng(12);
  for (int i = 0; i < 5; ++i) {
    const double mu = rng.uniform(-2, 2), s = rng.uniform(0.2, 3), nu = rng.uniform(1, 30);
    auto normal = [&](double x) {
      Tape t;
      DiagNormal d{t.constant(Matrix::Constant(1, 1, mu)), t.constant(Matrix::Constant(1, 1, s))};
      return std::exp(log_prob(d, t.constant(Matrix::Constant(1, 1, x))).value()(0, 0));
    };
    auto student = [&](double x) {
      Tape t;
      DiagStudentT d{t.constant(Matrix::Constant(1, 1, mu)), t.constant(Matrix::Constant(1, 1, s)),
                     t.constant(Matrix::Constant(1, 1, nu))};
      return std::exp(log_prob(d, t.constant(Matrix::Constant(1, 1, x))).value()(0, 0));
    };
    EXPECT_NEAR(integrate_real_line(normal, mu, s, 20000), 1.0, 1e-4);
    EXPECT_NEAR(integrate_real_line(student, mu, s, 20000), 1.0, 1e-4);
  }
}

TEST(Heads, OutputsArePositive) {
  Tape t;
  Matrix pre(1, 4);
  pre << -1e3, -40.0, 0.0, 50.0;
  Var y = positive(t.constant(pre));
  EXPECT_TRUE((y.value().array() > 0.0).all());
  EXPECT_NEAR(y.value()(0, 3), 50.0 + kPositiveFloor, 1e-12);
  EXPECT_NEAR(positive(t.constant(Matrix::Constant(1, 1, positive_inverse(10.0)))).value()(0, 0), 10.0, 1e-12);

  Rng rng(3);
  ParameterSet params;
  StudentTHead head(params, "dec", 5, 4, rng);
  NormalHead normal(params, "enc", 5, 4, rng);
  Var features = t.constant(random_matrix(6, 5, rng, -100, 100));
  auto d = head(t, features);
  auto n = normal(t, features);
  EXPECT_TRUE((d.scale.value().array() > 0.0).all());
  EXPECT_TRUE((d.dof.value().array() > 0.0).all());
  EXPECT_TRUE((n.scale.value().array() > 0.0).all());
  EXPECT_NEAR(d.dof.value()(0, 0), 10.0, 1e-9);
}

TEST(FcnStack, ShapesAndErrors) {
  Rng rng(2);
  ParameterSet params;
  FcnStack fcn(params, "f", 7, FcnStack::kDefaultWidth, rng);
  Tape t;
  Var y = fcn(t, t.constant(random_matrix(3, 7, rng)));
  EXPECT_EQ(y.rows(), 3);
  EXPECT_EQ(y.cols(), 100);
  EXPECT_TRUE((y.value().array() >= 0.0).all());
  EXPECT_THROW(fcn(t, t.constant(random_matrix(3, 6, rng))), ParameterError);
  EXPECT_EQ(params.size(), 8u);
}

TEST(AmsGrad, ZeroGradientLeavesParameters) {
  ParameterSet params;
  Parameter& p = params.add("p", Matrix::Constant(2, 3, 0.25));
  AmsGrad opt(params, {.lr = 1e-3});
  for (int i = 0; i < 10; ++i) {
    params.zero_grad();
    opt.step(params);
  }
  EXPECT_EQ(p.value, Matrix::Constant(2, 3, 0.25));
}

TEST(AmsGrad, FirstStepIsLearningRateTimesSign) {
  ParameterSet params;
  Parameter& p = params.add("p", Matrix::Zero(1, 2));
  AmsGrad opt(params, {.lr = 1e-4});
  p.grad << 3.0, -0.02;
  opt.step(params);
  EXPECT_NEAR(p.value(0, 0), -1e-4, 1e-9);
  EXPECT_NEAR(p.value(0, 1), 1e-4, 1e-9);
}

TEST(AmsGrad, QuadraticBowlConverges) {
  ParameterSet params;
  Parameter& p = params.add("p", Matrix::Zero(1, 3));
  Matrix target(1, 3);
  target << 0.7, -0.4, 0.15;
  AmsGrad opt(params, {.lr = 0.01});
  int steps = 0;
  for (; steps < 5000; ++steps) {
    p.grad = 2.0 * (p.value - target);
    opt.step(params);
    if ((p.value - target).cwiseAbs().maxCoeff() < 1e-6) break;
  }
  EXPECT_LT(steps, 5000);
  EXPECT_LT((p.value - target).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(AmsGrad, SkipsNonFiniteGradient) {
  ParameterSet params;
  Parameter& a = params.add("a", Matrix::Zero(1, 1));
  Parameter& b = params.add("b", Matrix::Zero(1, 1));
  AmsGrad opt(params, {.lr = 0.1});
  a.grad(0, 0) = NAN;
  b.grad(0, 0) = 1.0;
  auto skipped = opt.step(params);
  ASSERT_EQ(skipped.size(), 1u);
  EXPECT_EQ(skipped[0], "a");
  EXPECT_EQ(a.value(0, 0), 0.0);
  EXPECT_LT(b.value(0, 0), 0.0);
}

TEST(Clip, GlobalNorm) {
  ParameterSet params;
  Parameter& a = params.add("a", Matrix::Zero(1, 2));
  Parameter& b = params.add("b", Matrix::Zero(1, 1));
  a.grad << 30.0, 0.0;
  b.grad << 40.0;
  EXPECT_DOUBLE_EQ(clip_gradient_norm(params, 10.0), 50.0);
  EXPECT_NEAR(gradient_norm(params), 10.0, 1e-12);
  EXPECT_NEAR(a.grad(0, 0), 6.0, 1e-12);
}

TEST(Checkpoint, RoundTripRestoresValuesAndMoments) {
  Rng rng(1);
  ParameterSet params;
  Linear l(params, "l", 3, 2, rng);
  AmsGrad opt(params, {.lr = 0.01});
  for (std::size_t k = 0; k < params.size(); ++k) params[k].grad.setConstant(0.5);
  opt.step(params);
  std::stringstream buf;
  save_checkpoint(buf, params, opt);

  Rng other(99);
  ParameterSet fresh;
  Linear l2(fresh, "l", 3, 2, other);
  AmsGrad opt2(fresh, {.lr = 1.0});
  load_checkpoint(buf, fresh, opt2);
  for (std::size_t k = 0; k < params.size(); ++k) {
    EXPECT_EQ(fresh[k].value, params[k].value);
    EXPECT_EQ(opt2.slots()[k].v_max, opt.slots()[k].v_max);
  }
  EXPECT_EQ(opt2.options().lr, 0.01);

  ParameterSet wrong;
  Linear l3(wrong, "other", 3, 2, other);
  AmsGrad opt3(wrong, {});
  std::stringstream again;
  save_checkpoint(again, params, opt);
  EXPECT_THROW(load_checkpoint(again, wrong, opt3), IoError);
}

}  // namespace
}  // namespace phri::nn
