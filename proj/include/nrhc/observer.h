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

#ifndef NRHC_OBSERVER_H_
#define NRHC_OBSERVER_H_

#include <string_view>

#include <Eigen/Core>

#include "nrhc/dynamics.h"

namespace nrhc {

// How the configured poles relate to the gain K = Gamma(alpha)^-1 V.
//   kDesign:    poles are eig(A_i - V C_i); the estimator runs at poles/alpha.
//   kEffective: poles are the eigenvalues of the scaled error dynamics.
enum class PoleScaling { kDesign, kEffective };

// Which position the controller sees when the observer is in the loop.
enum class PositionSource { kMeasured, kEstimated };

std::string_view ToString(PoleScaling s);
PoleScaling ParsePoleScaling(std::string_view name);
std::string_view ToString(PositionSource s);
PositionSource ParsePositionSource(std::string_view name);

struct ObserverParams {
  double alpha = 0.01;
  Eigen::Vector2d poles{-0.4, -0.8};  // shared by every joint
  PoleScaling scaling = PoleScaling::kDesign;
  // Evaluate M0^-1 u on the estimate instead of the measured position.
  bool p_on_estimate = false;
  PositionSource position_source = PositionSource::kMeasured;
  // Saturation of |qdhat| before it is used; 0 disables it.
  double clamp = 0.0;

  void Validate() const;
};

struct ObserverGains {
  Eigen::Vector2d v;  // design vector (v1, v2)
  Eigen::Vector2d k;  // K = (v1 / alpha, v2 / alpha^2)
};

ObserverGains ObserverGain(const ObserverParams& op);

// zhat is interleaved per joint: (qhat_1, qdhat_1, qhat_2, qdhat_2, ...).
Eigen::VectorXd EstimatedPositions(const Eigen::VectorXd& zhat);
Eigen::VectorXd EstimatedVelocities(const Eigen::VectorXd& zhat,
                                    const ObserverParams& op);
Eigen::VectorXd Interleave(const Eigen::VectorXd& q, const Eigen::VectorXd& qd);

// High-gain observer
//   dzhat = A zhat + H f(zhat) + H P(q) u + K (y - C zhat)
// with f and P from the nominal model. P uses the measured position y
// unless op.p_on_estimate is set.
Eigen::VectorXd ObserverDerivative(const Eigen::VectorXd& zhat,
                                   const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& u,
                                   const ManipulatorModel& nominal,
                                   const ObserverParams& op);

}  // namespace nrhc

#endif  // NRHC_OBSERVER_H_
