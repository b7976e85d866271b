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

#ifndef NRHC_REFERENCE_H_
#define NRHC_REFERENCE_H_

#include <Eigen/Core>

namespace nrhc {

// Per-joint second-order filters
//   qref(s) = w^2 / (s^2 + 2 xi w s + w^2) r(s)
// driven by the smooth step r(t) = a (1 - exp(-k t) (1 + k t)).
//
// `literal_form` switches the input to a (1 - exp(-k t)) (1 + k t), which is
// unbounded in t.
struct RefModelParams {
  Eigen::VectorXd omega;  // rad/s
  Eigen::VectorXd xi;
  double amplitude = 1.5;  // rad
  double rate = 5.0;       // 1/s
  bool literal_form = false;

  int dof() const { return static_cast<int>(omega.size()); }
  void Validate() const;

  // w = 10 rad/s, xi = 1 on both joints.
  static RefModelParams TwoLinkDefault();
};

struct RefState {
  Eigen::VectorXd qref;    // rad
  Eigen::VectorXd qdref;   // rad/s
  Eigen::VectorXd qddref;  // rad/s^2

  static RefState Zero(int n);
};

// Time derivative of the filter state (qref, qdref).
struct RefRate {
  Eigen::VectorXd dqref;   // = qdref
  Eigen::VectorXd dqdref;  // = qddref
};

Eigen::VectorXd InputSignal(double t, const RefModelParams& p);

// qddref = w^2 (r - qref) - 2 xi w qdref, per joint.
Eigen::VectorXd RefAcceleration(const Eigen::VectorXd& qref,
                                const Eigen::VectorXd& qdref,
                                const Eigen::VectorXd& r,
                                const RefModelParams& p);

// Returns the filter derivative and refreshes rs.qddref to match it.
RefRate RefDerivative(RefState& rs, const Eigen::VectorXd& r,
                      const RefModelParams& p);

}  // namespace nrhc

#endif  // NRHC_REFERENCE_H_
