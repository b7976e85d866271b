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

#include "nrhc/errors.h"

namespace nrhc {

void RefModelParams::Validate() const {
  if (omega.size() == 0 || omega.size() != xi.size()) {
    throw ValidationError("reference omega and xi need one entry per joint");
  }
  if (!omega.allFinite() || (omega.array() <= 0.0).any()) {
    throw ValidationError("reference.omega entries must be > 0");
  }
  if (!xi.allFinite() || (xi.array() <= 0.0).any()) {
    throw ValidationError("reference.xi entries must be > 0");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ValidationError("reference.rate must be > 0");
  }
  if (!std::isfinite(amplitude)) {
    throw ValidationError("reference.amplitude must be finite");
  }
}

RefModelParams RefModelParams::TwoLinkDefault() {
  RefModelParams p;
  p.omega = Eigen::Vector2d(10.0, 10.0);
  p.xi = Eigen::Vector2d(1.0, 1.0);
  return p;
}

RefState RefState::Zero(int n) {
  return RefState{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n),
                  Eigen::VectorXd::Zero(n)};
}

Eigen::VectorXd InputSignal(double t, const RefModelParams& p) {
  if (!(t >= 0.0)) throw ValidationError("input signal needs t >= 0");
  const double kt = p.rate * t;
  const double e = std::exp(-kt);
  const double value = p.literal_form ? p.amplitude * (1.0 - e) * (1.0 + kt)
                                      : p.amplitude * (1.0 - e * (1.0 + kt));
  return Eigen::VectorXd::Constant(p.dof(), value);
}

Eigen::VectorXd RefAcceleration(const Eigen::VectorXd& qref,
                                const Eigen::VectorXd& qdref,
                                const Eigen::VectorXd& r,
                                const RefModelParams& p) {
  const Eigen::ArrayXd w = p.omega.array();
  return (w.square() * (r - qref).array() -
          2.0 * p.xi.array() * w * qdref.array())
      .matrix();
}

RefRate RefDerivative(RefState& rs, const Eigen::VectorXd& r,
                      const RefModelParams& p) {
  rs.qddref = RefAcceleration(rs.qref, rs.qdref, r, p);
  return RefRate{rs.qdref, rs.qddref};
}

}  // namespace nrhc
