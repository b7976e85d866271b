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

#include "nrhc/reference.h"

#include <cmath>

#include "gtest/gtest.h"
#include "nrhc/errors.h"

namespace nrhc {
namespace {

TEST(InputSignalTest, StartsAtZero) {
  EXPECT_TRUE(InputSignal(0.0, RefModelParams::TwoLinkDefault()).isZero(0));
}

TEST(InputSignalTest, ApproachesAmplitude) {
  const Eigen::VectorXd r = InputSignal(50.0, RefModelParams::TwoLinkDefault());
  EXPECT_NEAR(r(0), 1.5, 1e-12);
  EXPECT_NEAR(r(1), 1.5, 1e-12);
}

TEST(InputSignalTest, ValueAtOneSecond) {
  const Eigen::VectorXd r = InputSignal(1.0, RefModelParams::TwoLinkDefault());
  EXPECT_NEAR(r(0), 1.5 * (1 - 6 * std::exp(-5.0)), 1e-14);
  EXPECT_NEAR(r(0), 1.4393585, 1e-7);
  EXPECT_EQ(r(0), r(1));
}

TEST(InputSignalTest, FrozenValue) {
  const Eigen::VectorXd r = InputSignal(0.2, RefModelParams::TwoLinkDefault());
  EXPECT_NEAR(r(0), 0.396361676485673, 1e-14);
}

TEST(InputSignalTest, MonotoneAndBounded) {
  const RefModelParams p = RefModelParams::TwoLinkDefault();
  double prev = -1;
  for (int i = 0; i <= 400; ++i) {
    const double r = InputSignal(0.01 * i, p)(0);
    EXPECT_GE(r, prev);
    EXPECT_LE(r, 1.5);
    prev = r;
  }
}

TEST(InputSignalTest, LiteralFormGrowsWithoutBound) {
  RefModelParams p = RefModelParams::TwoLinkDefault();
  p.literal_form = true;
  const double t = 4.0;
  EXPECT_NEAR(InputSignal(t, p)(0), 1.5 * (1 - std::exp(-5 * t)) * (1 + 5 * t),
              1e-12);
  EXPECT_GT(InputSignal(10.0, p)(0), 70.0);
}

TEST(InputSignalTest, RejectsNegativeTime) {
  EXPECT_THROW(InputSignal(-1e-3, RefModelParams::TwoLinkDefault()),
               ValidationError);
}

TEST(RefAccelerationTest, AtRestOnTarget) {
  const RefModelParams p = RefModelParams::TwoLinkDefault();
  const Eigen::Vector2d r(0.7, -0.2);
  EXPECT_TRUE(RefAcceleration(r, Eigen::Vector2d::Zero(), r, p).isZero(0));
}

TEST(RefAccelerationTest, StepFromRest) {
  const RefModelParams p = RefModelParams::TwoLinkDefault();
  const Eigen::VectorXd a = RefAcceleration(
      Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), Eigen::Vector2d(1, 1), p);
  EXPECT_NEAR(a(0), 100.0, 1e-12);
  EXPECT_NEAR(a(1), 100.0, 1e-12);
}

TEST(RefDerivativeTest, RefreshesAcceleration) {
  const RefModelParams p = RefModelParams::TwoLinkDefault();
  RefState rs = RefState::Zero(2);
  rs.qdref = Eigen::Vector2d(0.5, -0.5);
  const RefRate rate = RefDerivative(rs, Eigen::Vector2d(1, 0), p);
  EXPECT_EQ(rate.dqref, rs.qdref);
  EXPECT_EQ(rate.dqdref, rs.qddref);
  EXPECT_NEAR(rs.qddref(0), 100.0 - 20.0 * 0.5, 1e-12);
  EXPECT_NEAR(rs.qddref(1), 20.0 * 0.5, 1e-12);
}

// Critically damped: integrating a held step never overshoots it.
TEST(RefDerivativeTest, StepResponseHasNoOvershoot) {
  const RefModelParams p = RefModelParams::TwoLinkDefault();
  RefState rs = RefState::Zero(2);
  const Eigen::Vector2d r(1.0, 1.0);
  const double dt = 1e-4;
  double peak = 0.0;
  for (int k = 0; k < 20000; ++k) {
    // Semi-implicit Euler is enough for a shape check at this step.
    const RefRate rate = RefDerivative(rs, r, p);
    rs.qdref += dt * rate.dqdref;
    rs.qref += dt * rs.qdref;
    peak = std::max(peak, rs.qref(0));
  }
  EXPECT_NEAR(rs.qref(0), 1.0, 1e-6);
  EXPECT_LE(peak, 1.0 + 1e-6);
}

TEST(RefModelParamsTest, Validation) {
  RefModelParams p = RefModelParams::TwoLinkDefault();
  p.omega(0) = 0.0;
  EXPECT_THROW(p.Validate(), ValidationError);
  p = RefModelParams::TwoLinkDefault();
  p.xi.resize(1);
  EXPECT_THROW(p.Validate(), ValidationError);
  p = RefModelParams::TwoLinkDefault();
  p.rate = -1;
  EXPECT_THROW(p.Validate(), ValidationError);
}

}  // namespace
}  // namespace nrhc
