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

#ifndef NRHC_CONTROL_H_
#define NRHC_CONTROL_H_

#include <array>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "nrhc/dynamics.h"
#include "nrhc/reference.h"

namespace nrhc {

enum class ControlVariant { kBasic, kComputedTorque, kIntegral };

std::string_view ToString(ControlVariant v);
// Accepts "basic", "computed_torque", "integral".
ControlVariant ParseControlVariant(std::string_view name);

// Weights Q = q_w I and R = r_w I, prediction increment h (horizon 2h).
struct ControllerParams {
  double q_w = 1e7;
  double r_w = 1e-14;
  double h = 1e-3;  // s
  ControlVariant variant = ControlVariant::kBasic;
  // Zero-order hold period for the applied torque; 0 re-evaluates the law
  // at every derivative evaluation.
  double sample_period = 0.0;
  // Bound on |e0| per joint for the integral variant; 0 disables it.
  double integral_clamp = 0.0;

  void Validate() const;
};

struct TrackingError {
  Eigen::VectorXd e0;  // integral of e1, rad s (integral variant only)
  Eigen::VectorXd e1;  // q - qref, rad
  Eigen::VectorXd e2;  // qd - qdref, rad/s
};

// Receding-horizon law with weights on the predicted error and effort:
//   u = -h^2 M (h^4 Q + M R M)^-1 Q (e1 + 2h e2 + h^2 (drift - qddref)).
Eigen::VectorXd NrhcTorque(const TrackingError& err,
                           const Eigen::VectorXd& drift,
                           const Eigen::VectorXd& qddref,
                           const Eigen::MatrixXd& m_nom,
                           const ControllerParams& cp);

// The R = 0 limit written with the nominal model terms:
//   u = -M0 (e1 + 2h e2) / h^2 + C0 qd + G0 + M0 qddref.
Eigen::VectorXd ComputedTorque(const TrackingError& err, const JointState& s,
                               const RefState& ref,
                               const ManipulatorModel& nominal, double h);

// Receding-horizon law on the integrated error e0:
//   u = -(2/3) h^3 M0 Pbar^-1 Q (2 e0 + 3h e1 + 2h^2 e2
//                                + (5/6) h^3 (drift - qddref)),
//   Pbar = (5/9) h^6 Q + M0 R M0.
Eigen::VectorXd NrhcIntegralTorque(const TrackingError& err,
                                   const Eigen::VectorXd& drift,
                                   const Eigen::VectorXd& qddref,
                                   const Eigen::MatrixXd& m_nom,
                                   const ControllerParams& cp);

// One (error, torque) sample of the running cost L = e'Qe + u'Ru.
struct CostSample {
  Eigen::VectorXd e;
  Eigen::VectorXd u;
};

// Simpson's rule over [t, t + 2h]: (h/3) (L(t) + 4 L(t+h) + L(t+2h)).
double SimpsonCost(const std::array<CostSample, 3>& samples,
                   const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                   double h);

// Scalar form of the same rule.
double SimpsonRule(double l0, double l1, double l2, double h);

// Chained first-order Taylor predictions of the tracking error:
//   e(t+h)  = e1 + h e2
//   e(t+2h) = e1 + 2h e2 + h^2 (drift - qddref) + h^2 P u,   P = M^-1.
std::pair<Eigen::VectorXd, Eigen::VectorXd> PredictError(
    const TrackingError& err, const Eigen::VectorXd& drift,
    const Eigen::VectorXd& qddref, const Eigen::VectorXd& u,
    const Eigen::MatrixXd& p, double h);

}  // namespace nrhc

#endif  // NRHC_CONTROL_H_
