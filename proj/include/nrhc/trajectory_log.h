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

#ifndef NRHC_TRAJECTORY_LOG_H_
#define NRHC_TRAJECTORY_LOG_H_

#include <vector>

#include <Eigen/Core>

namespace nrhc {

// One logged sample. `u` is the torque applied over [t, t + dt). Optional
// blocks (e0, zhat, est_err) are empty when the feature is off.
struct LogRow {
  double t = 0.0;
  Eigen::VectorXd q, qd;
  Eigen::VectorXd qref, qdref, qddref;
  Eigen::VectorXd e0, e1, e2;
  Eigen::VectorXd u;
  Eigen::VectorXd zhat;     // interleaved (qhat_i, qdhat_i)
  Eigen::VectorXd est_err;  // zhat - z, interleaved like zhat
};

struct TrajectoryLog {
  int dof = 0;
  bool has_integral = false;
  bool has_observer = false;
  double dt = 0.0;  // integration step
  std::vector<LogRow> rows;

  bool empty() const { return rows.empty(); }
};

}  // namespace nrhc

#endif  // NRHC_TRAJECTORY_LOG_H_
