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

#ifndef NRHC_DYNAMICS_H_
#define NRHC_DYNAMICS_H_

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace nrhc {

// Physical constants of one rigid link.
struct Link {
  double mass = 0.0;     // kg
  double length = 0.0;   // m
  double com = 0.0;      // distance from the joint to the center of mass, m
  double inertia = 0.0;  // about the center of mass, kg m^2
};

// Physical constants of an n-link planar arm. `motor_inertia` is the
// reflected actuator inertia N^2 Jm, added to the diagonal of D(q).
struct RobotParams {
  std::vector<Link> links;
  double gravity = 9.81;
  Eigen::VectorXd motor_inertia;  // empty means all zeros

  int dof() const { return static_cast<int>(links.size()); }

  // Throws ValidationError naming the first offending field.
  void Validate() const;

  // Standard two-link planar arm (10 kg and 5 kg links, 1 m long).
  static RobotParams TwoLinkTable();
};

struct JointState {
  Eigen::VectorXd q;   // rad
  Eigen::VectorXd qd;  // rad/s
};

// F = viscous * qd + coulomb * tanh(qd / eps). With `on_position` the
// viscous term multiplies q instead of qd.
struct FrictionParams {
  Eigen::VectorXd viscous;  // N m s / rad
  Eigen::VectorXd coulomb;  // N m
  double eps = 1e-3;        // rad/s
  bool on_position = false;

  void Validate(int dof) const;
};

// Load carried by the last link, folded into link 2 parameters.
struct PayloadPerturbation {
  double dm2 = 0.0;
  double dlc2 = 0.0;
  double dI2 = 0.0;
};

// Closed-form two-link model.
Eigen::MatrixXd MassMatrix(const Eigen::VectorXd& q, const RobotParams& p);
Eigen::MatrixXd CoriolisMatrix(const Eigen::VectorXd& q,
                               const Eigen::VectorXd& qd,
                               const RobotParams& p);
Eigen::VectorXd GravityVector(const Eigen::VectorXd& q, const RobotParams& p);
// Gauge U(0) = 0; gradient equals GravityVector.
double PotentialEnergy(const Eigen::VectorXd& q, const RobotParams& p);

Eigen::VectorXd FrictionTorque(const Eigen::VectorXd& qd,
                               const FrictionParams& f);
Eigen::VectorXd FrictionTorque(const Eigen::VectorXd& q,
                               const Eigen::VectorXd& qd,
                               const FrictionParams& f);

RobotParams ApplyPayload(const RobotParams& p, const PayloadPerturbation& d);

// Evaluators for M(q) qdd + C(q, qd) qd + G(q) = u.
class ManipulatorModel {
 public:
  virtual ~ManipulatorModel() = default;

  virtual int dof() const = 0;
  virtual Eigen::MatrixXd Inertia(const Eigen::VectorXd& q) const = 0;
  virtual Eigen::MatrixXd Coriolis(const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& qd) const = 0;
  virtual Eigen::VectorXd Gravity(const Eigen::VectorXd& q) const = 0;
  virtual double Potential(const Eigen::VectorXd& q) const = 0;
};

class TwoLinkArm final : public ManipulatorModel {
 public:
  explicit TwoLinkArm(RobotParams params);

  const RobotParams& params() const { return params_; }

  int dof() const override { return 2; }
  Eigen::MatrixXd Inertia(const Eigen::VectorXd& q) const override;
  Eigen::MatrixXd Coriolis(const Eigen::VectorXd& q,
                           const Eigen::VectorXd& qd) const override;
  Eigen::VectorXd Gravity(const Eigen::VectorXd& q) const override;
  double Potential(const Eigen::VectorXd& q) const override;

 private:
  RobotParams params_;
};

// Extension point for arms without a built-in closed form. The evaluators
// must honor the same contracts as the two-link model. A missing potential
// evaluator makes Potential() return NaN.
class FunctionModel final : public ManipulatorModel {
 public:
  struct Evaluators {
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> inertia;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&,
                                  const Eigen::VectorXd&)>
        coriolis;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gravity;
    std::function<double(const Eigen::VectorXd&)> potential;
  };

  FunctionModel(int dof, Evaluators evaluators);

  int dof() const override { return dof_; }
  Eigen::MatrixXd Inertia(const Eigen::VectorXd& q) const override;
  Eigen::MatrixXd Coriolis(const Eigen::VectorXd& q,
                           const Eigen::VectorXd& qd) const override;
  Eigen::VectorXd Gravity(const Eigen::VectorXd& q) const override;
  double Potential(const Eigen::VectorXd& q) const override;

 private:
  int dof_;
  Evaluators eval_;
};

// Solves M x = rhs with a Cholesky factorization. Throws ParameterFault if M
// is not positive definite or its condition estimate exceeds 1e12.
Eigen::VectorXd SolveInertia(const Eigen::MatrixXd& m,
                             const Eigen::VectorXd& rhs);

// qdd = M^-1 (u - C qd - G - friction).
Eigen::VectorXd ForwardDynamics(const ManipulatorModel& model,
                                const JointState& s, const Eigen::VectorXd& u);
Eigen::VectorXd ForwardDynamics(const ManipulatorModel& model,
                                const JointState& s, const Eigen::VectorXd& u,
                                const FrictionParams& friction);

// f(x1, x2) = -M^-1 (C qd + G). Friction never enters the drift.
Eigen::VectorXd DriftTerm(const ManipulatorModel& model, const JointState& s);

// Kinetic plus potential energy.
double TotalEnergy(const ManipulatorModel& model, const JointState& s);

struct InertiaBounds {
  double lower = 0.0;  // min eigenvalue of M(q) over the sample set
  double upper = 0.0;  // max eigenvalue of M(q) over the sample set
};

// Samples M(q) on a uniform grid over [-pi, pi)^n.
InertiaBounds EstimateInertiaBounds(const ManipulatorModel& model,
                                    int points_per_joint = 32);

// Estimates mu_c in ||C(q, x)|| <= mu_c ||x|| by sampling q on a grid and x
// on the unit sphere (C is linear in its velocity argument).
double EstimateCoriolisGain(const ManipulatorModel& model,
                            int points_per_joint = 16);

}  // namespace nrhc

#endif  // NRHC_DYNAMICS_H_
