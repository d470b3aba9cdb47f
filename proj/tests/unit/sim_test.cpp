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

#include <algorithm>
#include <chrono>
#include <complex>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <gtest/gtest.h>

#include <numeric>

#include "phri/common/dft.hpp"
#include "phri/common/error.hpp"
#include "phri/common/random.hpp"
#include "phri/sim/condition.hpp"
#include "phri/sim/dataset.hpp"
#include "phri/sim/generator.hpp"
#include "phri/sim/human.hpp"
#include "phri/sim/motor.hpp"
#include "phri/sim/profile.hpp"

namespace phri::sim {
namespace {

namespace fs = std::filesystem;
constexpr double kDt = 1.0 / 30.0;

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(fs::temp_directory_path() / ("phri_sim_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Closed-form area under the repeating trapezoid from 0 to T, written out
// segment by segment.
double trapezoid_area(double v, double ta, double tc, double T) {
  const double period = 4 * ta + 2 * tc;
  const double cycles = std::floor(T / period);
  double t = T - cycles * period;  // each full cycle contributes zero
  double area = 0.0;
  auto ramp = [](double v0, double v1, double len, double upto) {
    // Linear from v0 to v1 over len; integral over [0, upto].
    upto = std::clamp(upto, 0.0, len);
    return v0 * upto + 0.5 * (v1 - v0) / len * upto * upto;
  };
  const double seg[5] = {ta, tc, 2 * ta, tc, ta};
  const double from[5] = {0, v, v, -v, -v};
  const double to[5] = {v, v, -v, -v, 0};
  for (int i = 0; i < 5 && t > 0; ++i) {
    area += ramp(from[i], to[i], seg[i], t);
    t -= seg[i];
  }
  return area;
}

MotorState at_rest() { return MotorState{}; }

// ---- controller constants ----------------------------------------------------

TEST(MotorParams, DefaultsMatchControllerTable) {
  MotorParams p;
  EXPECT_EQ(p.m, 1.0);
  EXPECT_EQ(p.c, 50.0);
  EXPECT_EQ(p.k, 25.0);
  EXPECT_EQ(p.eta, 0.9);
  EXPECT_EQ(p.mu, 0.5);
  EXPECT_DOUBLE_EQ(p.dt, 1.0 / 30.0);
  EXPECT_NO_THROW(p.validate());
}

TEST(MotorParams, RejectsNonPositive) {
  MotorParams p;
  p.m = 0.0;
  EXPECT_THROW(p.validate(), ParameterError);
  p = MotorParams{};
  p.eta = 1.0;
  EXPECT_THROW(p.validate(), ParameterError);
  p = MotorParams{};
  p.dt = -1.0;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(TorqueEstimate, OneStepFromZeroMean) {
  MotorParams p;
  MotorState s = torque_estimate(at_rest(), 1.0, p);
  EXPECT_NEAR(s.tau_mean, 0.1, 1e-12);
  EXPECT_NEAR(s.tau, 0.9, 1e-12);
  EXPECT_NEAR(s.tau, p.kappa * s.current - s.tau_mean, 1e-15);
}

TEST(TorqueEstimate, ConstantCurrentDecaysToZero) {
  MotorParams p;
  MotorState s;
  for (int i = 0; i < 1000; ++i) s = torque_estimate(s, 2.5, p);
  EXPECT_NEAR(s.tau, 0.0, 1e-12);
  EXPECT_NEAR(s.tau_mean, 2.5, 1e-12);
}

TEST(TorqueEstimate, ZeroCurrentGivesZeroTorque) {
  MotorParams p;
  MotorState s;
  for (int i = 0; i < 10; ++i) {
    s = torque_estimate(s, 0.0, p);
    EXPECT_EQ(s.tau, 0.0);
  }
}

TEST(Admittance, HandComputedExamples) {
  MotorParams p;
  MotorState s;
  EXPECT_EQ(admittance_accel(s, 0.0, 0.0, p), 0.0);
  s.tau = 1.0;
  EXPECT_NEAR(admittance_accel(s, 0.0, 0.0, p), 1.0, 1e-12);
  s = MotorState{};
  s.theta = 0.1;
  EXPECT_NEAR(admittance_accel(s, 0.0, 0.0, p), -2.5, 1e-12);
  s = MotorState{};
  s.theta_dot = 0.2;
  EXPECT_NEAR(admittance_accel(s, 0.0, 0.1, p), -5.0, 1e-12);
}

TEST(Admittance, ZeroInertiaIsRejected) {
  MotorParams p;
  p.m = 0.0;
  EXPECT_THROW(admittance_accel(MotorState{}, 0.0, 0.0, p), ParameterError);
}

TEST(CommandStep, StationaryGivesZeroAction) {
  MotorParams p;
  CommandStep c = command_step(at_rest(), 0.0, p);
  EXPECT_EQ(c.commands.theta, 0.0);
  EXPECT_EQ(c.commands.theta_dot, 0.0);
  EXPECT_EQ(c.commands.tau, 0.0);
  for (double a : c.action) EXPECT_EQ(a, 0.0);
}

TEST(CommandStep, AntiResistanceTorque) {
  MotorParams p;
  MotorState s;
  s.tau = 1.0;
  EXPECT_NEAR(command_step(s, 0.0, p).commands.tau, -0.5, 1e-12);
}

TEST(CommandStep, AngleAdvancesByVelocityTimesDt) {
  MotorParams p;
  MotorState s;
  s.theta = 2.0;
  s.theta_dot = 1.0;
  CommandStep c = command_step(s, 0.0, p);
  EXPECT_NEAR(c.commands.theta - s.theta, 1.0 / 30.0, 1e-12);
  EXPECT_NEAR(c.commands.theta_dot, 1.0, 1e-12);
}

TEST(CommandStep, ActionIsDeltaFromPreviousCommands) {
  MotorParams p;
  MotorState s;
  s.theta = 0.3;
  s.theta_dot = -0.4;
  s.tau = 0.2;
  s.last = {0.25, -0.5, 0.05};
  const double accel = 1.5;
  CommandStep c = command_step(s, accel, p);
  const double td = -0.4 + 1.5 * kDt;
  const double th = 0.3 + td * kDt;
  EXPECT_NEAR(c.action[0], th - 0.25, 1e-12);
  EXPECT_NEAR(c.action[1], td + 0.5, 1e-12);
  EXPECT_NEAR(c.action[2], -0.1 - 0.05, 1e-12);
}

// ---- velocity profiles --------------------------------------------------------

TEST(Profile, DefaultsMatchMotionTable) {
  auto rs = ProfileParams::for_condition(Motion::kRotation, Speed::kSlow);
  auto rf = ProfileParams::for_condition(Motion::kRotation, Speed::kFast);
  auto ss = ProfileParams::for_condition(Motion::kSwing, Speed::kSlow);
  auto sf = ProfileParams::for_condition(Motion::kSwing, Speed::kFast);
  EXPECT_EQ(rs.v, 0.8);
  EXPECT_EQ(rf.v, 1.2);
  EXPECT_EQ(ss.v, 0.5);
  EXPECT_EQ(sf.v, 1.0);
  EXPECT_EQ(rs.t_a, 1.0);
  EXPECT_EQ(rs.t_c, 4.0);
  EXPECT_DOUBLE_EQ(ss.t_s, 0.6 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(rs.period(), 12.0);
}

TEST(Profile, HandComputedExamples) {
  auto rot = ProfileParams::for_condition(Motion::kRotation, Speed::kSlow);
  EXPECT_EQ(reference_velocity(rot, 0.0), 0.0);
  EXPECT_NEAR(reference_velocity(rot, rot.t_a), 0.8, 1e-12);
  EXPECT_NEAR(reference_velocity(rot, 0.5), 0.4, 1e-12);
  EXPECT_NEAR(reference_velocity(rot, 6.0), 0.0, 1e-12);
  EXPECT_NEAR(reference_velocity(rot, 8.0), -0.8, 1e-12);
  EXPECT_NEAR(reference_velocity(rot, 11.5), -0.4, 1e-12);

  auto swing = ProfileParams::for_condition(Motion::kSwing, Speed::kFast);
  EXPECT_NEAR(reference_velocity(swing, swing.t_s / 4.0), 0.0, 1e-12);
  EXPECT_NEAR(reference_velocity(swing, 0.0), swing.v, 1e-12);
  EXPECT_NEAR(reference_velocity(swing, swing.t_s / 2.0), -swing.v, 1e-12);
}

TEST(Profile, NegativeTimeIsRejected) {
  EXPECT_THROW(reference_velocity(ProfileParams{}, -0.1), ParameterError);
}

TEST(Profile, ExactlyPeriodic) {
  for (Motion m : {Motion::kRotation, Motion::kSwing}) {
    auto p = ProfileParams::for_condition(m, Speed::kFast);
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
      const double t = rng.uniform(0.0, 30.0);
      EXPECT_NEAR(reference_velocity(p, t), reference_velocity(p, t + p.period()), 1e-12) << t;
    }
  }
}

TEST(Profile, ContinuousAtBreakpoints) {
  auto p = ProfileParams::for_condition(Motion::kRotation, Speed::kFast);
  for (double b : {1.0, 5.0, 7.0, 11.0, 12.0}) {
    EXPECT_NEAR(reference_velocity(p, b - 1e-9), reference_velocity(p, b + 1e-9), 1e-6) << b;
  }
}

TEST(IntegrateReference, ZeroVelocityStaysPut) {
  ProfileParams p = ProfileParams::for_condition(Motion::kRotation, Speed::kSlow);
  p.v = 0.0;
  auto r = integrate_reference(p, 10.0, kDt);
  for (double th : r.theta) EXPECT_EQ(th, 0.0);
}

TEST(IntegrateReference, SwingReturnsAfterOnePeriod) {
  for (Speed s : {Speed::kSlow, Speed::kFast}) {
    auto p = ProfileParams::for_condition(Motion::kSwing, s);
    const double dt = 1e-3;
    auto r = integrate_reference(p, p.t_s, dt);
    EXPECT_LT(std::abs(r.theta.back()), p.v * dt * 2);
  }
}

TEST(IntegrateReference, RotationMatchesTrapezoidArea) {
  for (Speed s : {Speed::kSlow, Speed::kFast}) {
    auto p = ProfileParams::for_condition(Motion::kRotation, s);
    for (double dt : {kDt, 1e-3}) {
      auto r = integrate_reference(p, 30.0, dt);
      for (std::size_t k = 0; k < r.theta.size(); k += 7) {
        const double t = static_cast<double>(k) * dt;
        EXPECT_NEAR(r.theta[k], trapezoid_area(p.v, p.t_a, p.t_c, t), 2 * p.v * dt) << t;
      }
      // Net angle over a full cycle and over half a cycle.
      const auto cycle = static_cast<std::size_t>(std::llround(p.period() / dt));
      EXPECT_NEAR(r.theta[cycle], 0.0, 2 * p.v * dt);
      EXPECT_NEAR(r.theta[cycle / 2], p.v * (p.t_a + p.t_c), 2 * p.v * dt);
    }
  }
}

TEST(IntegrateReference, AngleIsNotWrapped) {
  auto p = ProfileParams::for_condition(Motion::kRotation, Speed::kFast);
  auto r = integrate_reference(p, 6.0, kDt);
  EXPECT_GT(r.theta.back(), 5.0);  // six turns minus ramps, never reduced modulo one
}

// ---- plant --------------------------------------------------------------------

TEST(Plant, MatchingCommandsWithoutLoadHoldVelocity) {
  MotorParams p;
  MotorState s;
  Commands c;
  for (int i = 0; i < 50; ++i) s = plant_step(s, c, 0.0, p);
  EXPECT_EQ(s.theta, 0.0);
  EXPECT_EQ(s.theta_dot, 0.0);
  EXPECT_EQ(s.current, 0.0);

  s.theta = 1.0;
  s.theta_dot = 0.5;
  c.theta_dot = 0.5;
  MotorState next = plant_step(s, c, 0.0, p);
  EXPECT_EQ(next.theta_dot, 0.5);
  EXPECT_NEAR(next.theta, 1.0 + 0.5 * kDt, 1e-15);
}

TEST(Plant, StepResponseSettlesWithinFiveTimeConstants) {
  MotorParams p;
  MotorState s;
  Commands c;
  c.theta_dot = 1.0;
  const int steps = static_cast<int>(std::ceil(5 * p.plant_tau / p.dt));
  for (int i = 0; i < steps; ++i) s = plant_step(s, c, 0.0, p);
  EXPECT_NEAR(s.theta_dot, 1.0, 0.01);
}

TEST(Plant, PeriodicLoadShowsInAngleSpectrum) {
  MotorParams p;
  MotorState s;
  const int n = 300;
  const double f = 1.5;  // lands on a DFT bin for 300 frames at 30 fps
  Eigen::VectorXd theta(n);
  for (int k = 0; k < n; ++k) {
    s = plant_step(s, Commands{}, 0.05 * std::sin(2 * std::numbers::pi * f * k * p.dt), p);
    theta(k) = s.theta;
  }
  theta.array() -= theta.mean();
  EXPECT_NEAR(dominant_frequency(theta, p.dt), f, 1e-9);
}

TEST(Plant, NonFiniteCommandIsRejected) {
  MotorParams p;
  Commands c;
  c.theta_dot = NAN;
  EXPECT_THROW(plant_step(MotorState{}, c, 0.0, p), NumericError);
  EXPECT_THROW(plant_step(MotorState{}, Commands{}, INFINITY, p), NumericError);
}

TEST(ClosedLoop, TrackedRestIsAFixedPoint) {
  MotorParams p;
  MotorState s;
  for (int i = 0; i < 200; ++i) {
    LoopStep step = closed_loop_step(s, 0.0, 0.0, 0.0, p);
    for (double a : step.action) EXPECT_EQ(a, 0.0);
    s = step.state;
  }
  EXPECT_EQ(s.theta, 0.0);
  EXPECT_EQ(s.theta_dot, 0.0);
  EXPECT_EQ(s.tau, 0.0);
}

TEST(ClosedLoop, TracksConstantReferenceVelocity) {
  MotorParams p;
  MotorState s;
  double ref = 0.0;
  for (int i = 0; i < 300; ++i) {
    s = closed_loop_step(s, ref, 0.8, 0.0, p).state;
    ref += 0.8 * p.dt;
  }
  EXPECT_NEAR(s.theta_dot, 0.8, 0.05);
  EXPECT_NEAR(s.theta, ref, 0.1);
}

// ---- human observer -----------------------------------------------------------

TEST(Human, KeypointNamesAreUniqueAndPaired) {
  const auto& names = keypoint_names();
  std::vector<std::string> sorted(names.begin(), names.end());
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::unique(sorted.begin(), sorted.end()), sorted.end());
  EXPECT_EQ(kObservationDim, 60);
}

TEST(Human, MirrorIsAnInvolution) {
  Rng rng(5);
  Eigen::VectorXd x(kObservationDim);
  for (int i = 0; i < kObservationDim; ++i) x(i) = rng.normal();
  EXPECT_EQ(mirror_observation(mirror_observation(x)), x);
  EXPECT_THROW(mirror_observation(Eigen::VectorXd::Zero(3)), ParameterError);
}

TEST(Human, LeftAndRightAreMirrorImagesWithoutNoise) {
  GeneratorParams gp;
  gp.human.noise_sigma = 0.0;
  for (Motion m : {Motion::kRotation, Motion::kSwing}) {
    for (Speed sp : {Speed::kSlow, Speed::kFast}) {
      Trajectory left = generate_trajectory({m, Arm::kLeft, sp}, 42, 200, gp);
      Trajectory right = generate_trajectory({m, Arm::kRight, sp}, 42, 200, gp);
      for (Eigen::Index k = 0; k < left.steps(); ++k) {
        Eigen::VectorXd mirrored = mirror_observation(right.observations.row(k).transpose());
        ASSERT_LT((mirrored - left.observations.row(k).transpose()).cwiseAbs().maxCoeff(), 1e-12) << k;
      }
      EXPECT_EQ(left.actions, right.actions);
    }
  }
}

TEST(Human, BodyStandsBesideTheDevicePlane) {
  GeneratorParams gp;
  gp.human.noise_sigma = 0.0;
  for (Arm arm : {Arm::kRight, Arm::kLeft}) {
    Trajectory t = generate_trajectory({Motion::kRotation, arm, Speed::kSlow}, 4, 300, gp);
    // Active wrist orbits around x = 0; the neck stays on the far side.
    const int wrist = arm == Arm::kRight ? 3 * 4 : 3 * 7;
    const double cx = 0.5 * (t.observations.col(wrist).maxCoeff() + t.observations.col(wrist).minCoeff());
    EXPECT_NEAR(cx, 0.0, 0.02);
    const double neck_x = t.observations.col(3 * 1).mean();
    EXPECT_NEAR(neck_x, arm == Arm::kRight ? -0.26 : 0.26, 0.05);
  }
}

TEST(Human, FastConditionsBraceLower) {
  GeneratorParams gp;
  gp.human.noise_sigma = 0.0;
  Trajectory slow = generate_trajectory({Motion::kRotation, Arm::kRight, Speed::kSlow}, 8, 100, gp);
  Trajectory fast = generate_trajectory({Motion::kRotation, Arm::kRight, Speed::kFast}, 8, 100, gp);
  const int hip_z = 3 * 8 + 2, ankle_z = 3 * 10 + 2;
  // The orbit keeps the hand at one height, so only the stance moves the hips.
  for (Eigen::Index k = 0; k < slow.steps(); ++k) {
    EXPECT_NEAR(fast.observations(k, hip_z) - slow.observations(k, hip_z), -gp.human.brace_drop, 1e-12);
    EXPECT_NEAR(fast.observations(k, ankle_z), slow.observations(k, ankle_z), 1e-12);
  }
}

TEST(Human, StanceSettlesAfterConditionSwitch) {
  HumanParams p;
  p.noise_sigma = 0.0;
  p.sway_sigma = 0.0;
  HumanModel h({Motion::kSwing, Arm::kRight, Speed::kSlow}, 1, p);
  const double before = h.observe(0.0, 0.0).observation(3 * 8 + 2);
  h.set_condition({Motion::kSwing, Arm::kRight, Speed::kFast});
  const double first = h.observe(0.0, 0.0).observation(3 * 8 + 2);
  EXPECT_LT(before - first, 0.5 * p.brace_drop);  // no jump
  EXPECT_GT(before - first, 0.0);
  double last = first;
  for (int i = 0; i < 150; ++i) last = h.observe(0.0, 0.0).observation(3 * 8 + 2);
  EXPECT_NEAR(before - last, p.brace_drop, 1e-3 * p.brace_drop);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(Human, RotationWristChannelsAreInQuadrature) {
  GeneratorParams gp;
  gp.human.noise_sigma = 0.0;
  Trajectory t = generate_trajectory({Motion::kRotation, Arm::kRight, Speed::kSlow}, 9, 300, gp);
  const int wrist = 3 * 4;
  Eigen::VectorXd x = t.observations.col(wrist);
  Eigen::VectorXd y = t.observations.col(wrist + 1);
  Eigen::VectorXd z = t.observations.col(wrist + 2);
  // A horizontal orbit: constant height, radius inside the speed-dependent
  // band and growing with the angular rate of the hand.
  const double cx = 0.5 * (x.maxCoeff() + x.minCoeff());
  const double cy = 0.5 * (y.maxCoeff() + y.minCoeff());
  Eigen::ArrayXd r = ((x.array() - cx).square() + (y.array() - cy).square()).sqrt();
  EXPECT_LT(z.maxCoeff() - z.minCoeff(), 1e-12);
  EXPECT_GT(r.minCoeff(), rotation_radius(Speed::kSlow, 0.0) - 0.01);
  EXPECT_LT(r.maxCoeff(), rotation_radius(Speed::kSlow, kMaxHandRate) + 0.01);
  EXPECT_GT(x.maxCoeff() - x.minCoeff(), 0.4);
  EXPECT_GT(y.maxCoeff() - y.minCoeff(), 0.4);

  std::vector<double> rate, radius;
  for (Eigen::Index k = 1; k < x.size(); ++k) {
    std::complex<double> a(x(k - 1) - cx, y(k - 1) - cy), b(x(k) - cx, y(k) - cy);
    rate.push_back(std::abs(std::arg(b / a)) / (2 * std::numbers::pi * t.dt));
    radius.push_back(r(k));
  }
  EXPECT_GT(pearson(rate, radius), 0.9);
}

TEST(Human, RotationRadiusFollowsHandRate) {
  EXPECT_DOUBLE_EQ(rotation_radius(Speed::kSlow, 1.0), 0.30);
  EXPECT_DOUBLE_EQ(rotation_radius(Speed::kFast, 0.0), 0.6 * 0.22);
  EXPECT_DOUBLE_EQ(rotation_radius(Speed::kFast, -1.0), 0.22);
  EXPECT_DOUBLE_EQ(rotation_radius(Speed::kSlow, 10.0), rotation_radius(Speed::kSlow, kMaxHandRate));
}

// Typical speed of the hand: median absolute rate of the unwrapped wrist angle.
double median_hand_rate(const Trajectory& t) {
  const int wrist = 3 * 4;
  Eigen::VectorXd x = t.observations.col(wrist);
  Eigen::VectorXd y = t.observations.col(wrist + 1);
  const double cx = 0.5 * (x.maxCoeff() + x.minCoeff());
  const double cy = 0.5 * (y.maxCoeff() + y.minCoeff());
  std::vector<double> rates;
  for (Eigen::Index k = 1; k < x.size(); ++k) {
    std::complex<double> a(x(k - 1) - cx, y(k - 1) - cy);
    std::complex<double> b(x(k) - cx, y(k) - cy);
    rates.push_back(std::abs(std::arg(b / a)) / (2 * std::numbers::pi * t.dt));
  }
  std::nth_element(rates.begin(), rates.begin() + static_cast<std::ptrdiff_t>(rates.size() / 2), rates.end());
  return rates[rates.size() / 2];
}

TEST(Human, FastToSlowFrequencyRatioMatchesCommandRatio) {
  GeneratorParams gp;
  gp.human.noise_sigma = 0.0;
  Trajectory slow = generate_trajectory({Motion::kRotation, Arm::kRight, Speed::kSlow}, 11, 900, gp);
  Trajectory fast = generate_trajectory({Motion::kRotation, Arm::kRight, Speed::kFast}, 11, 900, gp);
  const double fs = median_hand_rate(slow);
  const double ff = median_hand_rate(fast);
  EXPECT_NEAR(ff / fs, 1.2 / 0.8, 0.05);
  EXPECT_NEAR(fs, 0.8, 0.1);
}

// ---- generator ----------------------------------------------------------------

TEST(Generator, FullLengthCoversThirtySeconds) {
  Trajectory t = generate_trajectory({}, 1, 900);
  EXPECT_EQ(t.steps(), 900);
  EXPECT_NEAR(t.steps() * t.dt, 30.0, 1e-9);
  EXPECT_EQ(t.observations.cols(), 60);
  EXPECT_EQ(t.actions.cols(), 3);
  EXPECT_TRUE(t.observations.allFinite());
}

TEST(Generator, RejectsEmptyTrajectory) { EXPECT_THROW(generate_trajectory({}, 1, 0), ParameterError); }

TEST(Generator, DeterministicPerSeed) {
  Condition c{Motion::kSwing, Arm::kLeft, Speed::kFast};
  Trajectory a = generate_trajectory(c, 77, 120);
  Trajectory b = generate_trajectory(c, 77, 120);
  Trajectory d = generate_trajectory(c, 78, 120);
  EXPECT_EQ(a.observations, b.observations);
  EXPECT_EQ(a.actions, b.actions);
  EXPECT_NE(a.observations, d.observations);
}

TEST(Generator, ActionSumsRebuildCommands) {
  for (const Condition& c : all_conditions()) {
    Trajectory t = generate_trajectory(c, 3, 300);
    Eigen::RowVector3d acc = Eigen::RowVector3d::Zero();
    for (Eigen::Index k = 0; k < t.steps(); ++k) {
      acc += t.actions.row(k);
      ASSERT_LT((acc - t.commands.row(k)).cwiseAbs().maxCoeff(), 1e-12) << to_string(c) << " step " << k;
    }
  }
}

TEST(Generator, SpeedLabelsAreRecoverable) {
  for (int n : {300, 900}) {
    for (const Condition& c : all_conditions()) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Trajectory t = generate_trajectory(c, seed, n);
        EXPECT_EQ(infer_speed(c.motion, t.actions, t.dt), c.speed) << to_string(c) << " seed " << seed;
      }
    }
  }
}

TEST(Generator, FourPhaseScheduleKeepsArmAndSwitchesConditions) {
  GeneratorParams gp;
  gp.schedule = Schedule::kFourPhase;
  Condition first{Motion::kRotation, Arm::kLeft, Speed::kFast};
  auto phases = phase_conditions(first, gp.schedule);
  ASSERT_EQ(phases.size(), 4u);
  EXPECT_EQ(phases[0], first);
  for (const auto& p : phases) EXPECT_EQ(p.arm, Arm::kLeft);
  std::vector<int> idx;
  for (const auto& p : phases) idx.push_back(p.index());
  std::sort(idx.begin(), idx.end());
  EXPECT_EQ(std::unique(idx.begin(), idx.end()), idx.end());

  Trajectory t = generate_trajectory(first, 5, 400, gp);
  for (int k = 0; k < 400; ++k) EXPECT_EQ(t.labels[static_cast<std::size_t>(k)], phases[static_cast<std::size_t>(k / 100)].index());
}

TEST(Condition, IndexAndNameRoundTrip) {
  auto all = all_conditions();
  for (int i = 0; i < kConditionCount; ++i) {
    EXPECT_EQ(all[static_cast<std::size_t>(i)].index(), i);
    EXPECT_EQ(condition_from_string(to_string(all[static_cast<std::size_t>(i)])), all[static_cast<std::size_t>(i)]);
  }
  EXPECT_EQ(to_string(Condition{Motion::kSwing, Arm::kLeft, Speed::kFast}), "swing-left-fast");
  EXPECT_THROW(condition_from_string("hop-left-fast"), ParameterError);
  EXPECT_THROW(Condition::from_index(8), ParameterError);
}

// ---- dataset ------------------------------------------------------------------

TEST(Dataset, DeskScaleWritesAllSplitsQuickly) {
  TempDir dir("desk");
  auto start = std::chrono::steady_clock::now();
  Manifest m = generate_dataset(DatasetSpec::desk_scale(), dir.path(), false);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 10.0);
  ASSERT_EQ(m.trajectories.size(), 48u);
  int train = 0, val = 0, test = 0;
  for (const auto& r : m.trajectories) {
    EXPECT_TRUE(fs::exists(dir.path() / (r.id + ".csv")));
    train += r.split == "train";
    val += r.split == "val";
    test += r.split == "test";
  }
  EXPECT_EQ(train, 32);
  EXPECT_EQ(val, 8);
  EXPECT_EQ(test, 8);
}

TEST(Dataset, FullScaleCounts) {
  TempDir dir("full");
  Manifest m = generate_dataset(DatasetSpec::full_scale(), dir.path(), false);
  int train = 0;
  for (const auto& r : m.trajectories) {
    train += r.split == "train";
    EXPECT_EQ(r.n_steps, 900);
  }
  EXPECT_EQ(train, 88);
  EXPECT_EQ(m.trajectories.size(), 8u * 17u);
}

TEST(Dataset, ManifestRoundTrips) {
  TempDir dir("manifest");
  Manifest m = generate_dataset(DatasetSpec::desk_scale(), dir.path(), false);
  EXPECT_EQ(read_manifest(dir.path() / "manifest.json"), m);
  fs::path copy = dir.path() / "copy.json";
  write_manifest(m, copy);
  EXPECT_EQ(read_manifest(copy), m);
  EXPECT_EQ(slurp(copy), slurp(dir.path() / "manifest.json"));
}

TEST(Dataset, LoadedTrajectoriesMatchGenerator) {
  TempDir dir("load");
  DatasetSpec spec = DatasetSpec::desk_scale();
  spec.n_steps = 60;
  generate_dataset(spec, dir.path(), false);
  Dataset d = load_dataset(dir.path());
  ASSERT_EQ(d.trajectories.size(), 48u);
  for (std::size_t i = 0; i < d.trajectories.size(); i += 5) {
    const auto& r = d.manifest.trajectories[i];
    Trajectory fresh = generate_trajectory(r.condition, r.seed, spec.n_steps, spec.params);
    EXPECT_EQ(d.trajectories[i].observations, fresh.observations) << r.id;
    EXPECT_EQ(d.trajectories[i].actions, fresh.actions) << r.id;
    EXPECT_LT((d.trajectories[i].commands - fresh.commands).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(d.trajectories[i].labels, fresh.labels);
  }
  EXPECT_EQ(d.split("train").size(), 32u);
  EXPECT_EQ(d.split("test").size(), 8u);
}

TEST(Dataset, StandardizedTrainingSplitHasUnitMoments) {
  TempDir dir("stats");
  DatasetSpec spec = DatasetSpec::desk_scale();
  spec.n_steps = 60;
  generate_dataset(spec, dir.path(), false);
  Dataset d = load_dataset(dir.path());
  Eigen::MatrixXd all(0, kObservationDim);
  for (const auto* t : d.split("train")) {
    Eigen::MatrixXd z = d.manifest.observation_stats.apply(t->observations);
    Eigen::MatrixXd grown(all.rows() + z.rows(), kObservationDim);
    grown << all, z;
    all = grown;
  }
  Eigen::VectorXd mean = all.colwise().mean();
  Eigen::VectorXd var = (all.rowwise() - mean.transpose()).array().square().colwise().mean();
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((var.array() - 1.0).abs().maxCoeff(), 1e-9);

  Eigen::MatrixXd acts(0, kActionDim);
  for (const auto* t : d.split("train")) {
    Eigen::MatrixXd z = d.manifest.action_stats.apply(t->actions);
    Eigen::MatrixXd grown(acts.rows() + z.rows(), kActionDim);
    grown << acts, z;
    acts = grown;
  }
  Eigen::VectorXd amean = acts.colwise().mean();
  Eigen::VectorXd avar = (acts.rowwise() - amean.transpose()).array().square().colwise().mean();
  EXPECT_LT(amean.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((avar.array() - 1.0).abs().maxCoeff(), 1e-9);
}

TEST(Dataset, RefusesOverwriteWithoutForce) {
  TempDir dir("force");
  DatasetSpec spec = DatasetSpec::desk_scale();
  spec.n_steps = 20;
  generate_dataset(spec, dir.path(), false);
  EXPECT_THROW(generate_dataset(spec, dir.path(), false), IoError);
  spec.seed = 2;
  Manifest m = generate_dataset(spec, dir.path(), true);
  EXPECT_EQ(read_manifest(dir.path() / "manifest.json").base_seed, 2u);
  EXPECT_EQ(m.base_seed, 2u);
}

TEST(Dataset, RerunIsByteIdentical) {
  TempDir a("rerun_a");
  TempDir b("rerun_b");
  DatasetSpec spec = DatasetSpec::desk_scale();
  spec.n_steps = 50;
  Manifest m = generate_dataset(spec, a.path(), false);
  generate_dataset(spec, b.path(), false);
  EXPECT_EQ(slurp(a.path() / "manifest.json"), slurp(b.path() / "manifest.json"));
  for (const auto& r : m.trajectories) {
    EXPECT_EQ(slurp(a.path() / (r.id + ".csv")), slurp(b.path() / (r.id + ".csv"))) << r.id;
  }
}

TEST(Dataset, CsvRoundTripIsBitExact) {
  TempDir dir("csv");
  fs::create_directories(dir.path());
  Trajectory t = generate_trajectory({}, 8, 40);
  t.observations(0, 0) = 0.1 + 0.2;  // not representable in short decimal form
  t.actions(3, 1) = -1e-300;
  write_trajectory_csv(t, dir.path() / "t.csv");
  Eigen::MatrixXd obs, act;
  read_trajectory_csv(dir.path() / "t.csv", obs, act);
  EXPECT_EQ(obs, t.observations);
  EXPECT_EQ(act, t.actions);

  std::ifstream in(dir.path() / "t.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.substr(0, 10), "t,o_0,o_1,");
  EXPECT_EQ(header.substr(header.size() - 16), "o_59,a_0,a_1,a_2");
}

TEST(Dataset, MalformedCsvIsAnIoError) {
  TempDir dir("bad");
  fs::create_directories(dir.path());
  {
    std::ofstream out(dir.path() / "bad.csv");
    out << "t,o_0,a_0\n0,1.5,abc\n";
  }
  Eigen::MatrixXd obs, act;
  EXPECT_THROW(read_trajectory_csv(dir.path() / "bad.csv", obs, act), IoError);
  {
    std::ofstream out(dir.path() / "short.csv");
    out << "t,o_0,a_0\n0,1.5\n";
  }
  EXPECT_THROW(read_trajectory_csv(dir.path() / "short.csv", obs, act), IoError);
  EXPECT_THROW(read_trajectory_csv(dir.path() / "missing.csv", obs, act), IoError);
  EXPECT_THROW(load_dataset(dir.path()), IoError);
}

}  // namespace
}  // namespace phri::sim
