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

#include "nrhc/control.h"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "nrhc/errors.h"

namespace nrhc {
namespace {

// Solves S x = b for symmetric positive definite S.
Eigen::VectorXd SolveSpd(const Eigen::MatrixXd& s, const Eigen::VectorXd& b,
                         const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 0.0)) {
    throw ParameterFault(std::string(what) + " is singular");
  }
  return llt.solve(b);
}

void CheckSizes(const TrackingError& err, const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  if (m.cols() != n || err.e1.size() != n || err.e2.size() != n) {
    throw ValidationError("controller inputs have inconsistent sizes");
  }
}

}  // namespace

std::string_view ToString(ControlVariant v) {
  switch (v) {
    case ControlVariant::kBasic:
      return "basic";
    case ControlVariant::kComputedTorque:
      return "computed_torque";
    case ControlVariant::kIntegral:
      return "integral";
  }
  return "basic";
}

ControlVariant ParseControlVariant(std::string_view name) {
  if (name == "basic") return ControlVariant::kBasic;
  if (name == "computed_torque") return ControlVariant::kComputedTorque;
  if (name == "integral") return ControlVariant::kIntegral;
  throw ValidationError("unknown controller variant '" + std::string(name) +
                        "' (expected basic, computed_torque or integral)");
}

void ControllerParams::Validate() const {
  if (!(q_w > 0.0) || !std::isfinite(q_w)) {
    throw ValidationError("controller.q_w must be > 0");
  }
  if (!(r_w >= 0.0) || !std::isfinite(r_w)) {
    throw ValidationError("controller.r_w must be >= 0");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ValidationError("controller.h must be > 0");
  }
  if (variant == ControlVariant::kComputedTorque && r_w != 0.0) {
    throw ValidationError("controller.r_w must be 0 for computed_torque");
  }
  if (!(sample_period >= 0.0)) {
    throw ValidationError("controller.sample_period must be >= 0");
  }
  if (!(integral_clamp >= 0.0)) {
    throw ValidationError("controller.integral_clamp must be >= 0");
  }
}

Eigen::VectorXd NrhcTorque(const TrackingError& err,
                           const Eigen::VectorXd& drift,
                           const Eigen::VectorXd& qddref,
                           const Eigen::MatrixXd& m_nom,
                           const ControllerParams& cp) {
  CheckSizes(err, m_nom);
  const auto n = m_nom.rows();
  const double h = cp.h;
  const double h2 = h * h;
  const Eigen::MatrixXd inner =
      h2 * h2 * cp.q_w * Eigen::MatrixXd::Identity(n, n) +
      cp.r_w * m_nom * m_nom;
  const Eigen::VectorXd bracket =
      err.e1 + 2.0 * h * err.e2 + h2 * (drift - qddref);
  return -h2 * (m_nom * SolveSpd(inner, cp.q_w * bracket, "h^4 Q + M R M"));
}

Eigen::VectorXd ComputedTorque(const TrackingError& err, const JointState& s,
                               const RefState& ref,
                               const ManipulatorModel& nominal, double h) {
  if (!(h > 0.0)) throw ValidationError("h must be > 0");
  const Eigen::MatrixXd m = nominal.Inertia(s.q);
  CheckSizes(err, m);
  return -m * (err.e1 + 2.0 * h * err.e2) / (h * h) +
         nominal.Coriolis(s.q, s.qd) * s.qd + nominal.Gravity(s.q) +
         m * ref.qddref;
}

Eigen::VectorXd NrhcIntegralTorque(const TrackingError& err,
                                   const Eigen::VectorXd& drift,
                                   const Eigen::VectorXd& qddref,
                                   const Eigen::MatrixXd& m_nom,
                                   const ControllerParams& cp) {
  CheckSizes(err, m_nom);
  if (err.e0.size() != m_nom.rows()) {
    throw ValidationError("integral controller needs e0");
  }
  const auto n = m_nom.rows();
  const double h = cp.h;
  const double h2 = h * h;
  const double h3 = h2 * h;
  const Eigen::MatrixXd pbar =
      (5.0 / 9.0) * h3 * h3 * cp.q_w * Eigen::MatrixXd::Identity(n, n) +
      cp.r_w * m_nom * m_nom;
  const Eigen::VectorXd bracket = 2.0 * err.e0 + 3.0 * h * err.e1 +
                                  2.0 * h2 * err.e2 +
                                  (5.0 / 6.0) * h3 * (drift - qddref);
  return -(2.0 / 3.0) * h3 *
         (m_nom * SolveSpd(pbar, cp.q_w * bracket, "(5/9) h^6 Q + M R M"));
}

double SimpsonRule(double l0, double l1, double l2, double h) {
  return h / 3.0 * (l0 + 4.0 * l1 + l2);
}

double SimpsonCost(const std::array<CostSample, 3>& samples,
                   const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                   double h) {
  if (!(h > 0.0)) throw ValidationError("h must be > 0");
  std::array<double, 3> l{};
  for (int k = 0; k < 3; ++k) {
    const CostSample& s = samples[k];
    l[k] = s.e.dot(q * s.e) + s.u.dot(r * s.u);
  }
  return SimpsonRule(l[0], l[1], l[2], h);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> PredictError(
    const TrackingError& err, const Eigen::VectorXd& drift,
    const Eigen::VectorXd& qddref, const Eigen::VectorXd& u,
    const Eigen::MatrixXd& p, double h) {
  const double h2 = h * h;
  Eigen::VectorXd one = err.e1 + h * err.e2;
  Eigen::VectorXd two =
      err.e1 + 2.0 * h * err.e2 + h2 * (drift - qddref) + h2 * (p * u);
  return {std::move(one), std::move(two)};
}

}  // namespace nrhc
