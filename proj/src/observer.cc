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

#include "nrhc/observer.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "nrhc/errors.h"

namespace nrhc {

std::string_view ToString(PoleScaling s) {
  return s == PoleScaling::kDesign ? "design" : "effective";
}

PoleScaling ParsePoleScaling(std::string_view name) {
  if (name == "design") return PoleScaling::kDesign;
  if (name == "effective") return PoleScaling::kEffective;
  throw ValidationError("unknown pole scaling '" + std::string(name) +
                        "' (expected design or effective)");
}

std::string_view ToString(PositionSource s) {
  return s == PositionSource::kMeasured ? "measured" : "estimated";
}

PositionSource ParsePositionSource(std::string_view name) {
  if (name == "measured") return PositionSource::kMeasured;
  if (name == "estimated") return PositionSource::kEstimated;
  throw ValidationError("unknown position source '" + std::string(name) +
                        "' (expected measured or estimated)");
}

void ObserverParams::Validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("observer.alpha must be > 0");
  }
  if (!poles.allFinite() || !(poles(0) < 0.0) || !(poles(1) < 0.0)) {
    throw ValidationError("observer.poles must be strictly negative");
  }
  if (!(clamp >= 0.0)) throw ValidationError("observer.clamp must be >= 0");
}

ObserverGains ObserverGain(const ObserverParams& op) {
  op.Validate();
  const double p1 = op.poles(0);
  const double p2 = op.poles(1);
  // Characteristic polynomial of A_i - V C_i is s^2 + v1 s + v2.
  Eigen::Vector2d design(-(p1 + p2), p1 * p2);
  const double a = op.alpha;
  ObserverGains g;
  if (op.scaling == PoleScaling::kDesign) {
    g.v = design;
    g.k = Eigen::Vector2d(design(0) / a, design(1) / (a * a));
  } else {
    g.k = design;
    g.v = Eigen::Vector2d(design(0) * a, design(1) * a * a);
  }
  return g;
}

Eigen::VectorXd EstimatedPositions(const Eigen::VectorXd& zhat) {
  const auto n = zhat.size() / 2;
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = zhat(2 * i);
  return q;
}

Eigen::VectorXd EstimatedVelocities(const Eigen::VectorXd& zhat,
                                    const ObserverParams& op) {
  const auto n = zhat.size() / 2;
  Eigen::VectorXd qd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = zhat(2 * i + 1);
    if (op.clamp > 0.0) v = std::clamp(v, -op.clamp, op.clamp);
    qd(i) = v;
  }
  return qd;
}

Eigen::VectorXd Interleave(const Eigen::VectorXd& q,
                           const Eigen::VectorXd& qd) {
  Eigen::VectorXd z(2 * q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    z(2 * i) = q(i);
    z(2 * i + 1) = qd(i);
  }
  return z;
}

Eigen::VectorXd ObserverDerivative(const Eigen::VectorXd& zhat,
                                   const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& u,
                                   const ManipulatorModel& nominal,
                                   const ObserverParams& op) {
  const int n = nominal.dof();
  if (zhat.size() != 2 * n || y.size() != n || u.size() != n) {
    throw ValidationError("observer inputs have inconsistent sizes");
  }
  if (!zhat.allFinite() || !y.allFinite() || !u.allFinite()) {
    throw ValidationError("observer inputs must be finite");
  }
  const Eigen::Vector2d k = ObserverGain(op).k;
  const JointState est{EstimatedPositions(zhat), EstimatedVelocities(zhat, op)};
  const Eigen::VectorXd drift = DriftTerm(nominal, est);
  const Eigen::VectorXd& p_at = op.p_on_estimate ? est.q : y;
  const Eigen::VectorXd pu = SolveInertia(nominal.Inertia(p_at), u);

  Eigen::VectorXd dz(2 * n);
  for (int i = 0; i < n; ++i) {
    const double innovation = y(i) - zhat(2 * i);
    dz(2 * i) = est.qd(i) + k(0) * innovation;
    dz(2 * i + 1) = drift(i) + pu(i) + k(1) * innovation;
  }
  return dz;
}

}  // namespace nrhc
