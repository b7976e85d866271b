// Copyright 2026 The nrhc Authors
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

#include "nrhc/sim.h"

#include <cmath>

#include "gtest/gtest.h"
#include "nrhc/errors.h"

namespace nrhc {
namespace {

double OscillatorError(double dt) {
  const Derivative f = [](double, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(Eigen::Vector2d(x(1), -x(0)));
  };
  Eigen::VectorXd x = Eigen::Vector2d(1, 0);
  const int steps = static_cast<int>(std::lround(1.0 / dt));
  for (int k = 0; k < steps; ++k) x = Rk4Step(f, x, k * dt, dt);
  return std::abs(x(0) - std::cos(1.0));
}

TEST(Rk4StepTest, ConstantDerivative) {
  const Eigen::VectorXd c = Eigen::Vector3d(1.5, -2.0, 0.25);
  const Derivative f = [&](double, const Eigen::VectorXd&) { return c; };
  const Eigen::VectorXd x0 = Eigen::Vector3d(1, 2, 3);
  const Eigen::VectorXd x1 = Rk4Step(f, x0, 0.0, 0.5);
  EXPECT_LT((x1 - (x0 + 0.5 * c)).norm(), 1e-15);
}

TEST(Rk4StepTest, ZeroDerivativeIsIdentity) {
  const Derivative f = [](double, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(Eigen::VectorXd::Zero(x.size()));
  };
  const Eigen::VectorXd x0 = Eigen::Vector3d(0.1, 1e300, -7.25);
  EXPECT_EQ(Rk4Step(f, x0, 3.0, 1e-3), x0);
}

TEST(Rk4StepTest, FourthOrderOnHarmonicOscillator) {
  const double e1 = OscillatorError(0.1);
  const double e2 = OscillatorError(0.05);
  EXPECT_GE(std::log2(e1 / e2), 3.9);
}

TEST(Rk4StepTest, NonFiniteDerivativeReportsTime) {
  const Derivative f = [](double, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(x.array() / 0.0);
  };
  try {
    Rk4Step(f, Eigen::Vector2d(1, 1), 2.5, 0.1);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_NEAR(e.time(), 2.5, 0.1);
  }
}

TEST(RunScenarioTest, LogSpacingIsUniform) {
  SimConfig cfg;
  cfg.t_end = 0.0105;
  cfg.log_stride = 10;
  const TrajectoryLog log = RunScenario(cfg);
  ASSERT_EQ(log.rows.size(), 11u);
  for (size_t i = 1; i < log.rows.size(); ++i) {
    EXPECT_NEAR(log.rows[i].t - log.rows[i - 1].t, 1e-3, 1e-15);
  }
  EXPECT_EQ(log.rows.front().t, 0.0);
  EXPECT_NEAR(log.rows.back().t, 0.01, 1e-15);
}

TEST(RunScenarioTest, DeterministicBitForBit) {
  SimConfig cfg;
  cfg.t_end = 0.3;
  cfg.plant = ApplyPayload(cfg.nominal, {1.0, 0.1, 0.05});
  const TrajectoryLog a = RunScenario(cfg);
  const TrajectoryLog b = RunScenario(cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].q, b.rows[i].q);
    EXPECT_EQ(a.rows[i].u, b.rows[i].u);
  }
}

TEST(RunScenarioTest, FreeFallConservesEnergy) {
  SimConfig cfg;
  cfg.controller_enabled = false;
  cfg.t_end = 5.0;
  cfg.log_stride = 100;
  cfg.reference.amplitude = 0.0;
  cfg.initial.q = Eigen::Vector2d(0.3, -0.7);
  const TrajectoryLog log = RunScenario(cfg);
  const TwoLinkArm arm(cfg.plant);
  const double e0 = TotalEnergy(arm, {log.rows.front().q, log.rows.front().qd});
  double worst = 0.0;
  for (const LogRow& r : log.rows) {
    worst = std::max(worst, std::abs(TotalEnergy(arm, {r.q, r.qd}) - e0));
    EXPECT_TRUE(r.u.isZero(0));
  }
  EXPECT_LT(worst, 1e-6 * std::abs(e0));
}

// With the reference at rest, computed torque leaves
// e'' + (2/h) e' + e / h^2 = 0, so e(t) = e(0) (1 + t/h) exp(-t/h).
TEST(RunScenarioTest, ComputedTorqueMatchesAnalyticError) {
  SimConfig cfg;
  cfg.controller.variant = ControlVariant::kComputedTorque;
  cfg.controller.r_w = 0.0;
  cfg.reference.amplitude = 0.0;
  cfg.t_end = 0.1;
  cfg.log_stride = 1;
  cfg.initial.q = Eigen::Vector2d(0.01, -0.02);
  const double h = cfg.controller.h;
  const TrajectoryLog log = RunScenario(cfg);
  double worst = 0.0;
  for (const LogRow& r : log.rows) {
    const double shape = (1 + r.t / h) * std::exp(-r.t / h);
    worst = std::max(worst, std::abs(r.e1(0) - 0.01 * shape));
    worst = std::max(worst, std::abs(r.e1(1) + 0.02 * shape));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(RunScenarioTest, MatchedRunIsStepConverged) {
  SimConfig coarse;
  SimConfig fine = coarse;
  fine.dt = coarse.dt / 2;
  fine.log_stride = 2 * coarse.log_stride;
  const LogRow a = RunScenario(coarse).rows.back();
  const LogRow b = RunScenario(fine).rows.back();
  EXPECT_NEAR(a.t, b.t, 1e-12);
  EXPECT_LT((a.q - b.q).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((a.qd - b.qd).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(RunScenarioTest, ZeroOrderHoldKeepsTorqueConstant) {
  SimConfig cfg;
  cfg.t_end = 0.05;
  cfg.log_stride = 1;
  cfg.controller.sample_period = 1e-3;
  const TrajectoryLog log = RunScenario(cfg);
  int changes = 0;
  for (size_t i = 1; i < log.rows.size(); ++i) {
    if (log.rows[i].u != log.rows[i - 1].u) {
      ++changes;
      EXPECT_EQ(i % 10, 0u) << "torque changed inside a hold at row " << i;
    }
  }
  EXPECT_GT(changes, 10);
}

TEST(RunScenarioTest, SamplePeriodMustBeMultipleOfStep) {
  SimConfig cfg;
  cfg.controller.sample_period = 1.5e-4;
  EXPECT_THROW(RunScenario(cfg), ValidationError);
}

TEST(RunScenarioTest, IntegralClampBoundsState) {
  SimConfig cfg;
  cfg.controller.variant = ControlVariant::kIntegral;
  cfg.controller.integral_clamp = 1e-6;
  cfg.initial.q = Eigen::Vector2d(0.01, -0.01);
  cfg.t_end = 0.5;
  cfg.log_stride = 1;
  const TrajectoryLog log = RunScenario(cfg);
  ASSERT_TRUE(log.has_integral);
  bool reached = false;
  for (const LogRow& r : log.rows) {
    EXPECT_LE(r.e0.cwiseAbs().maxCoeff(), 1e-6);
    reached = reached || r.e0.cwiseAbs().maxCoeff() == 1e-6;
  }
  EXPECT_TRUE(reached);
}

TEST(RunScenarioTest, DivergenceGuardReportsTime) {
  SimConfig cfg;
  cfg.controller.variant = ControlVariant::kIntegral;
  cfg.plant = ApplyPayload(cfg.nominal, {5, 0.5, 1.0 / 6});
  cfg.friction = FrictionParams{Eigen::Vector2d(5, 5), Eigen::Vector2d(0, 0)};
  try {
    RunScenario(cfg);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), cfg.t_end);
  }
}

TEST(RunScenarioTest, MatchedRunTracksReference) {
  SimConfig cfg;
  const TrajectoryLog log = RunScenario(cfg);
  const LogRow& last = log.rows.back();
  EXPECT_NEAR(last.t, 4.0, 1e-12);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(std::abs(last.e1(i)), 1e-3);
    EXPECT_GT(std::abs(last.e1(i)), 0.0);
  }
}

TEST(RunScenarioTest, ZeroEffortWeightBeatsSmallWeight) {
  SimConfig weighted;
  SimConfig exact = weighted;
  exact.controller.r_w = 0.0;
  const Metrics mp = ComputeMetrics(RunScenario(weighted), 1e-3);
  const Metrics me = ComputeMetrics(RunScenario(exact), 1e-3);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(me.steady_state_e1(i), mp.steady_state_e1(i));
  }
}

TEST(SimConfigTest, Validation) {
  SimConfig cfg;
  cfg.t_end = 9e-4;
  EXPECT_THROW(cfg.Validate(), ValidationError);
  cfg = SimConfig{};
  cfg.t_end = 1e-3;
  EXPECT_NO_THROW(cfg.Validate());
  cfg = SimConfig{};
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.Validate(), ValidationError);
  cfg = SimConfig{};
  cfg.dt = 5e-4;
  EXPECT_EQ(cfg.Validate().size(), 1u);
  cfg = SimConfig{};
  cfg.initial.q = Eigen::Vector3d::Zero();
  EXPECT_THROW(cfg.Validate(), ValidationError);
}

TrajectoryLog SyntheticLog(int rows, double e1) {
  TrajectoryLog log;
  log.dof = 1;
  log.dt = 0.01;
  for (int i = 0; i < rows; ++i) {
    LogRow r;
    r.t = 0.01 * i;
    r.e1 = Eigen::VectorXd::Constant(1, e1);
    r.u = Eigen::VectorXd::Constant(1, 2.0);
    log.rows.push_back(r);
  }
  return log;
}

TEST(ComputeMetricsTest, ZeroErrorSettlesImmediately) {
  const Metrics m = ComputeMetrics(SyntheticLog(101, 0.0), 1e-3);
  EXPECT_EQ(m.rms_e1(0), 0.0);
  ASSERT_TRUE(m.settling_time.has_value());
  EXPECT_EQ(*m.settling_time, 0.0);
  EXPECT_NEAR(m.energy_u, 4.0 * 1.0, 1e-12);
  EXPECT_EQ(m.max_torque(0), 2.0);
}

TEST(ComputeMetricsTest, ConstantErrorNeverSettles) {
  const Metrics m = ComputeMetrics(SyntheticLog(101, 0.01), 0.005);
  EXPECT_NEAR(m.steady_state_e1(0), 0.01, 1e-15);
  EXPECT_NEAR(m.rms_e1(0), 0.01, 1e-15);
  EXPECT_FALSE(m.settling_time.has_value());
}

TEST(ComputeMetricsTest, SettlesAfterLastViolation) {
  TrajectoryLog log = SyntheticLog(101, 0.0);
  log.rows[40].e1(0) = -0.5;
  const Metrics m = ComputeMetrics(log, 1e-3);
  ASSERT_TRUE(m.settling_time.has_value());
  EXPECT_NEAR(*m.settling_time, 0.41, 1e-12);
}

TEST(ComputeMetricsTest, MatchedRunMetricsAreNonnegative) {
  SimConfig cfg;
  cfg.t_end = 2.0;
  const Metrics m = ComputeMetrics(RunScenario(cfg), 1e-3);
  EXPECT_TRUE(m.max_torque.allFinite());
  EXPECT_GT(m.max_torque.minCoeff(), 0.0);
  EXPECT_GE(m.rms_e1.minCoeff(), 0.0);
  EXPECT_GT(m.energy_u, 0.0);
  ASSERT_TRUE(m.settling_time.has_value());
  EXPECT_LE(*m.settling_time, 2.0);
}

TEST(ComputeMetricsTest, RejectsEmptyLog) {
  EXPECT_THROW(ComputeMetrics(TrajectoryLog{}, 1e-3), ValidationError);
}

}  // namespace
}  // namespace nrhc
