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

#ifndef NRHC_SIM_H_
#define NRHC_SIM_H_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nrhc/control.h"
#include "nrhc/dynamics.h"
#include "nrhc/observer.h"
#include "nrhc/reference.h"
#include "nrhc/trajectory_log.h"

namespace nrhc {

using Derivative =
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)>;

// Classical fourth-order Runge-Kutta step. Throws DivergenceError if any
// stage derivative is non-finite.
Eigen::VectorXd Rk4Step(const Derivative& f, const Eigen::VectorXd& x,
                        double t, double dt);

struct SimConfig {
  double dt = 1e-4;   // s
  double t_end = 4.0; // s
  int log_stride = 10;
  bool use_observer = false;
  // Off leaves the plant unforced (free-motion checks).
  bool controller_enabled = true;
  ControllerParams controller;
  ObserverParams observer;
  RobotParams nominal = RobotParams::TwoLinkTable();
  RobotParams plant = RobotParams::TwoLinkTable();
  std::optional<FrictionParams> friction;
  RefModelParams reference = RefModelParams::TwoLinkDefault();
  JointState initial{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
  // Interleaved (qhat_i, qdhat_i); empty starts the observer at `initial`.
  Eigen::VectorXd initial_zhat;
  // Abort when ||qd|| exceeds this, rad/s.
  double divergence_velocity = 1e4;
  // Optional replacements for the closed-form two-link models.
  std::shared_ptr<const ManipulatorModel> nominal_model;
  std::shared_ptr<const ManipulatorModel> plant_model;

  int dof() const;
  // Throws ValidationError on hard violations; returns soft warnings.
  std::vector<std::string> Validate() const;
};

// Integrates plant, reference filters, integral state and observer as one
// ODE with the controller evaluated inside the derivative. Throws
// DivergenceError when ||qd|| exceeds cfg.divergence_velocity.
TrajectoryLog RunScenario(const SimConfig& cfg);

struct Metrics {
  Eigen::VectorXd rms_e1;           // rad, per joint
  Eigen::VectorXd steady_state_e1;  // mean |e1| over the final 10%, rad
  Eigen::VectorXd max_torque;       // N m, per joint
  std::optional<double> settling_time;  // s; empty when never settled
  double energy_u = 0.0;            // integral of ||u||^2 dt
  double band = 0.0;
};

Metrics ComputeMetrics(const TrajectoryLog& log, double band);

}  // namespace nrhc

#endif  // NRHC_SIM_H_
