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

#include "nrhc/dynamics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "nrhc/errors.h"

namespace nrhc {
namespace {

constexpr double kMaxCondition = 1e12;

void RequireFinite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) {
    throw ValidationError(std::string(what) + " has non-finite entries");
  }
}

void RequireTwoLink(const RobotParams& p, const Eigen::VectorXd& q) {
  if (p.dof() != 2) {
    throw ValidationError(
        "closed-form model covers two links only; use FunctionModel for n = " +
        std::to_string(p.dof()));
  }
  if (q.size() != 2) {
    throw ValidationError("joint vector has size " + std::to_string(q.size()) +
                          ", expected 2");
  }
  RequireFinite(q, "q");
}

double MotorInertia(const RobotParams& p, int i) {
  return p.motor_inertia.size() == 0 ? 0.0 : p.motor_inertia(i);
}

// Grid point `index` of a uniform grid with `per_joint` points on [-pi, pi).
Eigen::VectorXd GridPoint(int n, int per_joint, long index) {
  Eigen::VectorXd q(n);
  for (int j = 0; j < n; ++j) {
    const long k = index % per_joint;
    index /= per_joint;
    q(j) = -std::numbers::pi + 2.0 * std::numbers::pi * k / per_joint;
  }
  return q;
}

}  // namespace

void RobotParams::Validate() const {
  if (links.empty()) throw ValidationError("robot has no links");
  for (int i = 0; i < dof(); ++i) {
    const Link& l = links[i];
    const std::string key = "link" + std::to_string(i + 1);
    if (!(l.mass > 0.0)) throw ValidationError(key + ".mass must be > 0");
    if (!(l.length > 0.0)) throw ValidationError(key + ".length must be > 0");
    if (!(l.com >= 0.0)) throw ValidationError(key + ".com must be >= 0");
    if (!(l.inertia > 0.0)) {
      throw ValidationError(key + ".inertia must be > 0");
    }
    if (l.com > l.length) {
      throw ValidationError(key + ".com must not exceed " + key + ".length");
    }
  }
  if (!(gravity >= 0.0) || !std::isfinite(gravity)) {
    throw ValidationError("gravity must be finite and >= 0");
  }
  if (motor_inertia.size() != 0) {
    if (motor_inertia.size() != dof()) {
      throw ValidationError("motor_inertia must have one entry per joint");
    }
    if (!motor_inertia.allFinite() || (motor_inertia.array() < 0.0).any()) {
      throw ValidationError("motor_inertia entries must be finite and >= 0");
    }
  }
}

RobotParams RobotParams::TwoLinkTable() {
  RobotParams p;
  p.links = {Link{10.0, 1.0, 0.5, 10.0 / 12.0}, Link{5.0, 1.0, 0.5, 5.0 / 12.0}};
  p.gravity = 9.81;
  p.motor_inertia = Eigen::VectorXd::Zero(2);
  return p;
}

void FrictionParams::Validate(int dof) const {
  if (viscous.size() != dof || coulomb.size() != dof) {
    throw ValidationError("friction gains must have one entry per joint");
  }
  if ((viscous.array() < 0.0).any() || (coulomb.array() < 0.0).any() ||
      !viscous.allFinite() || !coulomb.allFinite()) {
    throw ValidationError("friction gains must be finite and >= 0");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ValidationError("friction.eps must be > 0");
  }
}

Eigen::MatrixXd MassMatrix(const Eigen::VectorXd& q, const RobotParams& p) {
  RequireTwoLink(p, q);
  const Link& a = p.links[0];
  const Link& b = p.links[1];
  const double c2 = std::cos(q(1));
  const double m22 = b.inertia + b.mass * b.com * b.com;
  const double m12 = m22 + b.mass * a.length * b.com * c2;
  const double m11 = a.mass * a.com * a.com + b.mass * b.com * b.com +
                     b.mass * a.length * a.length +
                     2.0 * b.mass * a.length * b.com * c2 + a.inertia +
                     b.inertia;
  Eigen::MatrixXd m(2, 2);
  m << m11 + MotorInertia(p, 0), m12, m12, m22 + MotorInertia(p, 1);

  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw ParameterFault("inertia matrix is not positive definite");
  }
  return m;
}

Eigen::MatrixXd CoriolisMatrix(const Eigen::VectorXd& q,
                               const Eigen::VectorXd& qd,
                               const RobotParams& p) {
  RequireTwoLink(p, q);
  if (qd.size() != 2) throw ValidationError("qd must have size 2");
  RequireFinite(qd, "qd");
  const double k =
      p.links[1].mass * p.links[0].length * p.links[1].com * std::sin(q(1));
  Eigen::MatrixXd c(2, 2);
  c << -qd(1) * k, -(qd(0) + qd(1)) * k,  //
      qd(0) * k, 0.0;
  return c;
}

Eigen::VectorXd GravityVector(const Eigen::VectorXd& q, const RobotParams& p) {
  RequireTwoLink(p, q);
  const Link& a = p.links[0];
  const Link& b = p.links[1];
  const double g12 = b.mass * b.com * p.gravity * std::cos(q(0) + q(1));
  Eigen::VectorXd g(2);
  g << (a.mass * a.com + b.mass * a.length) * p.gravity * std::cos(q(0)) + g12,
      g12;
  return g;
}

double PotentialEnergy(const Eigen::VectorXd& q, const RobotParams& p) {
  RequireTwoLink(p, q);
  const Link& a = p.links[0];
  const Link& b = p.links[1];
  return (a.mass * a.com + b.mass * a.length) * p.gravity * std::sin(q(0)) +
         b.mass * b.com * p.gravity * std::sin(q(0) + q(1));
}

Eigen::VectorXd FrictionTorque(const Eigen::VectorXd& qd,
                               const FrictionParams& f) {
  RequireFinite(qd, "qd");
  return f.viscous.cwiseProduct(qd) +
         f.coulomb.cwiseProduct((qd.array() / f.eps).tanh().matrix());
}

Eigen::VectorXd FrictionTorque(const Eigen::VectorXd& q,
                               const Eigen::VectorXd& qd,
                               const FrictionParams& f) {
  if (!f.on_position) return FrictionTorque(qd, f);
  RequireFinite(q, "q");
  RequireFinite(qd, "qd");
  return f.viscous.cwiseProduct(q) +
         f.coulomb.cwiseProduct((qd.array() / f.eps).tanh().matrix());
}

RobotParams ApplyPayload(const RobotParams& p, const PayloadPerturbation& d) {
  if (p.dof() < 2) throw ValidationError("payload needs a second link");
  RobotParams out = p;
  Link& l2 = out.links[1];
  l2.mass += d.dm2;
  l2.com += d.dlc2;
  l2.inertia += d.dI2;
  try {
    out.Validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("payload perturbation invalid: ") +
                          e.what());
  }
  return out;
}

TwoLinkArm::TwoLinkArm(RobotParams params) : params_(std::move(params)) {
  params_.Validate();
  if (params_.dof() != 2) {
    throw ValidationError("TwoLinkArm needs exactly two links");
  }
}

Eigen::MatrixXd TwoLinkArm::Inertia(const Eigen::VectorXd& q) const {
  return MassMatrix(q, params_);
}

Eigen::MatrixXd TwoLinkArm::Coriolis(const Eigen::VectorXd& q,
                                     const Eigen::VectorXd& qd) const {
  return CoriolisMatrix(q, qd, params_);
}

Eigen::VectorXd TwoLinkArm::Gravity(const Eigen::VectorXd& q) const {
  return GravityVector(q, params_);
}

double TwoLinkArm::Potential(const Eigen::VectorXd& q) const {
  return PotentialEnergy(q, params_);
}

FunctionModel::FunctionModel(int dof, Evaluators evaluators)
    : dof_(dof), eval_(std::move(evaluators)) {
  if (dof_ < 1) throw ValidationError("model needs at least one joint");
  if (!eval_.inertia || !eval_.coriolis || !eval_.gravity) {
    throw ValidationError("inertia, coriolis and gravity evaluators required");
  }
}

Eigen::MatrixXd FunctionModel::Inertia(const Eigen::VectorXd& q) const {
  RequireFinite(q, "q");
  Eigen::MatrixXd m = eval_.inertia(q);
  if (m.rows() != dof_ || m.cols() != dof_) {
    throw ParameterFault("inertia evaluator returned wrong shape");
  }
  if ((m - m.transpose()).norm() > 1e-9 * m.norm() ||
      Eigen::LLT<Eigen::MatrixXd>(m).info() != Eigen::Success) {
    throw ParameterFault("inertia evaluator returned a non-SPD matrix");
  }
  return m;
}

Eigen::MatrixXd FunctionModel::Coriolis(const Eigen::VectorXd& q,
                                        const Eigen::VectorXd& qd) const {
  RequireFinite(q, "q");
  RequireFinite(qd, "qd");
  return eval_.coriolis(q, qd);
}

Eigen::VectorXd FunctionModel::Gravity(const Eigen::VectorXd& q) const {
  RequireFinite(q, "q");
  return eval_.gravity(q);
}

double FunctionModel::Potential(const Eigen::VectorXd& q) const {
  return eval_.potential ? eval_.potential(q) : std::nan("");
}

Eigen::VectorXd SolveInertia(const Eigen::MatrixXd& m,
                             const Eigen::VectorXd& rhs) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw ParameterFault("inertia matrix is not positive definite");
  }
  const double rcond = llt.rcond();
  if (!(rcond * kMaxCondition > 1.0)) {
    throw ParameterFault("inertia matrix is ill-conditioned (rcond " +
                         std::to_string(rcond) + ")");
  }
  return llt.solve(rhs);
}

Eigen::VectorXd ForwardDynamics(const ManipulatorModel& model,
                                const JointState& s,
                                const Eigen::VectorXd& u) {
  RequireFinite(u, "u");
  const Eigen::VectorXd bias =
      model.Coriolis(s.q, s.qd) * s.qd + model.Gravity(s.q);
  return SolveInertia(model.Inertia(s.q), u - bias);
}

Eigen::VectorXd ForwardDynamics(const ManipulatorModel& model,
                                const JointState& s, const Eigen::VectorXd& u,
                                const FrictionParams& friction) {
  return ForwardDynamics(model, s, u - FrictionTorque(s.q, s.qd, friction));
}

Eigen::VectorXd DriftTerm(const ManipulatorModel& model, const JointState& s) {
  return ForwardDynamics(model, s, Eigen::VectorXd::Zero(model.dof()));
}

double TotalEnergy(const ManipulatorModel& model, const JointState& s) {
  return 0.5 * s.qd.dot(model.Inertia(s.q) * s.qd) + model.Potential(s.q);
}

InertiaBounds EstimateInertiaBounds(const ManipulatorModel& model,
                                    int points_per_joint) {
  const int n = model.dof();
  long total = 1;
  for (int j = 0; j < n; ++j) total *= points_per_joint;
  InertiaBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (long i = 0; i < total; ++i) {
    const Eigen::VectorXd q = GridPoint(n, points_per_joint, i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.Inertia(q),
                                                      Eigen::EigenvaluesOnly);
    b.lower = std::min(b.lower, es.eigenvalues().minCoeff());
    b.upper = std::max(b.upper, es.eigenvalues().maxCoeff());
  }
  return b;
}

double EstimateCoriolisGain(const ManipulatorModel& model,
                            int points_per_joint) {
  const int n = model.dof();
  std::vector<Eigen::VectorXd> directions;
  if (n == 2) {
    constexpr int kAngles = 64;
    for (int k = 0; k < kAngles; ++k) {
      const double a = std::numbers::pi * k / kAngles;
      directions.emplace_back(Eigen::Vector2d(std::cos(a), std::sin(a)));
    }
  } else {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 256; ++k) {
      Eigen::VectorXd x(n);
      for (int j = 0; j < n; ++j) x(j) = normal(rng);
      directions.push_back(x.normalized());
    }
  }
  long total = 1;
  for (int j = 0; j < n; ++j) total *= points_per_joint;
  double gain = 0.0;
  for (long i = 0; i < total; ++i) {
    const Eigen::VectorXd q = GridPoint(n, points_per_joint, i);
    for (const Eigen::VectorXd& x : directions) {
      const Eigen::MatrixXd c = model.Coriolis(q, x);
      gain = std::max(gain, c.operatorNorm());
    }
  }
  return gain;
}

}  // namespace nrhc
