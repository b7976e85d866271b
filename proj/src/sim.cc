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

#include "nrhc/sim.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nrhc/errors.h"

namespace nrhc {
namespace {

// Offsets of each block inside the augmented state vector.
struct Layout {
  int n = 0;
  int q = 0, qd = 0, qref = 0, qdref = 0;
  int e0 = -1;    // integral variant only
  int zhat = -1;  // observer only
  int size = 0;
};

Layout MakeLayout(int n, bool integral, bool observer) {
  Layout l;
  l.n = n;
  l.q = 0;
  l.qd = n;
  l.qref = 2 * n;
  l.qdref = 3 * n;
  int next = 4 * n;
  if (integral) {
    l.e0 = next;
    next += n;
  }
  if (observer) {
    l.zhat = next;
    next += 2 * n;
  }
  l.size = next;
  return l;
}

// Closed-loop system shared by the integrator and the logger.
class ClosedLoop {
 public:
  ClosedLoop(const SimConfig& cfg, const ManipulatorModel& nominal,
             const ManipulatorModel& plant)
      : cfg_(cfg),
        nominal_(nominal),
        plant_(plant),
        layout_(MakeLayout(nominal.dof(),
                           cfg.controller.variant == ControlVariant::kIntegral,
                           cfg.use_observer)) {}

  const Layout& layout() const { return layout_; }

  Eigen::VectorXd InitialState() const {
    const int n = layout_.n;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(layout_.size);
    x.segment(layout_.q, n) = cfg_.initial.q;
    x.segment(layout_.qd, n) = cfg_.initial.qd;
    if (layout_.zhat >= 0) {
      x.segment(layout_.zhat, 2 * n) =
          cfg_.initial_zhat.size() == 0
              ? Interleave(cfg_.initial.q, cfg_.initial.qd)
              : cfg_.initial_zhat;
    }
    return x;
  }

  // Everything the controller sees at (t, x).
  struct View {
    RefState ref;
    JointState plant;
    JointState control;  // state handed to the control law
    TrackingError err;
  };

  View Observe(double t, const Eigen::VectorXd& x) const {
    const int n = layout_.n;
    View v;
    v.plant = {x.segment(layout_.q, n), x.segment(layout_.qd, n)};
    v.ref.qref = x.segment(layout_.qref, n);
    v.ref.qdref = x.segment(layout_.qdref, n);
    v.ref.qddref = RefAcceleration(v.ref.qref, v.ref.qdref,
                                   InputSignal(t, cfg_.reference),
                                   cfg_.reference);
    v.control = v.plant;
    if (layout_.zhat >= 0) {
      const Eigen::VectorXd zhat = x.segment(layout_.zhat, 2 * n);
      v.control.qd = EstimatedVelocities(zhat, cfg_.observer);
      if (cfg_.observer.position_source == PositionSource::kEstimated) {
        v.control.q = EstimatedPositions(zhat);
      }
    }
    v.err.e1 = v.control.q - v.ref.qref;
    v.err.e2 = v.control.qd - v.ref.qdref;
    if (layout_.e0 >= 0) {
      v.err.e0 = x.segment(layout_.e0, n);
      if (cfg_.controller.integral_clamp > 0.0) {
        const double c = cfg_.controller.integral_clamp;
        v.err.e0 = v.err.e0.cwiseMax(-c).cwiseMin(c);
      }
    }
    return v;
  }

  Eigen::VectorXd Control(const View& v) const {
    const int n = layout_.n;
    if (!cfg_.controller_enabled) return Eigen::VectorXd::Zero(n);
    const ControllerParams& cp = cfg_.controller;
    switch (cp.variant) {
      case ControlVariant::kComputedTorque:
        return ComputedTorque(v.err, v.control, v.ref, nominal_, cp.h);
      case ControlVariant::kBasic:
        return NrhcTorque(v.err, DriftTerm(nominal_, v.control),
                          v.ref.qddref, nominal_.Inertia(v.control.q), cp);
      case ControlVariant::kIntegral:
        return NrhcIntegralTorque(v.err, DriftTerm(nominal_, v.control),
                                  v.ref.qddref,
                                  nominal_.Inertia(v.control.q), cp);
    }
    return Eigen::VectorXd::Zero(n);
  }

  // `held` is the zero-order-hold torque; empty means continuous control.
  Eigen::VectorXd Derivative(double t, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& held) const {
    const int n = layout_.n;
    const View v = Observe(t, x);
    const Eigen::VectorXd u = held.size() == 0 ? Control(v) : held;

    Eigen::VectorXd dx(layout_.size);
    dx.segment(layout_.q, n) = v.plant.qd;
    dx.segment(layout_.qd, n) =
        cfg_.friction ? ForwardDynamics(plant_, v.plant, u, *cfg_.friction)
                      : ForwardDynamics(plant_, v.plant, u);
    dx.segment(layout_.qref, n) = v.ref.qdref;
    dx.segment(layout_.qdref, n) = v.ref.qddref;
    if (layout_.e0 >= 0) {
      Eigen::VectorXd de0 = v.err.e1;
      const double c = cfg_.controller.integral_clamp;
      if (c > 0.0) {
        // Stop integrating outward once the clamp is reached.
        const Eigen::VectorXd e0 = x.segment(layout_.e0, n);
        for (int i = 0; i < n; ++i) {
          if ((e0(i) >= c && de0(i) > 0.0) || (e0(i) <= -c && de0(i) < 0.0)) {
            de0(i) = 0.0;
          }
        }
      }
      dx.segment(layout_.e0, n) = de0;
    }
    if (layout_.zhat >= 0) {
      dx.segment(layout_.zhat, 2 * n) =
          ObserverDerivative(x.segment(layout_.zhat, 2 * n), v.plant.q, u,
                             nominal_, cfg_.observer);
    }
    return dx;
  }

  LogRow Row(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
             const View& v) const {
    const int n = layout_.n;
    LogRow r;
    r.t = t;
    r.q = v.plant.q;
    r.qd = v.plant.qd;
    r.qref = v.ref.qref;
    r.qdref = v.ref.qdref;
    r.qddref = v.ref.qddref;
    r.e0 = v.err.e0;
    r.e1 = v.err.e1;
    r.e2 = v.err.e2;
    r.u = u;
    if (layout_.zhat >= 0) {
      r.zhat = x.segment(layout_.zhat, 2 * n);
      r.est_err = r.zhat - Interleave(v.plant.q, v.plant.qd);
    }
    return r;
  }

 private:
  const SimConfig& cfg_;
  const ManipulatorModel& nominal_;
  const ManipulatorModel& plant_;
  Layout layout_;
};

std::string TimeString(double t) {
  std::ostringstream s;
  s << t;
  return s.str();
}

}  // namespace

Eigen::VectorXd Rk4Step(const Derivative& f, const Eigen::VectorXd& x,
                        double t, double dt) {
  auto checked = [&](double tt, const Eigen::VectorXd& xx) {
    Eigen::VectorXd d = f(tt, xx);
    if (!d.allFinite()) {
      throw DivergenceError("non-finite derivative at t = " + TimeString(tt),
                            tt);
    }
    return d;
  };
  const double half = 0.5 * dt;
  const Eigen::VectorXd k1 = checked(t, x);
  const Eigen::VectorXd k2 = checked(t + half, x + half * k1);
  const Eigen::VectorXd k3 = checked(t + half, x + half * k2);
  const Eigen::VectorXd k4 = checked(t + dt, x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

int SimConfig::dof() const {
  return nominal_model ? nominal_model->dof() : nominal.dof();
}

std::vector<std::string> SimConfig::Validate() const {
  std::vector<std::string> warnings;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
  if (!(t_end >= 10.0 * dt)) {
    throw ValidationError("t_end must be at least 10 dt");
  }
  if (log_stride < 1) throw ValidationError("log_stride must be >= 1");
  if (!(divergence_velocity > 0.0)) {
    throw ValidationError("divergence_velocity must be > 0");
  }
  controller.Validate();
  if (dt > controller.h / 10.0) {
    warnings.push_back("dt exceeds h/10; the prediction increment is poorly "
                       "resolved");
  }
  if (controller.sample_period > 0.0) {
    const double ratio = controller.sample_period / dt;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6) {
      throw ValidationError(
          "controller.sample_period must be a positive multiple of dt");
    }
  }
  if (!nominal_model) nominal.Validate();
  if (!plant_model) plant.Validate();
  const int n = dof();
  const int plant_n = plant_model ? plant_model->dof() : plant.dof();
  if (plant_n != n) throw ValidationError("plant and nominal joint counts differ");
  reference.Validate();
  if (reference.dof() != n) {
    throw ValidationError("reference needs one filter per joint");
  }
  if (friction) friction->Validate(n);
  if (use_observer) observer.Validate();
  if (initial.q.size() != n || initial.qd.size() != n ||
      !initial.q.allFinite() || !initial.qd.allFinite()) {
    throw ValidationError("initial state must be finite with one entry per joint");
  }
  if (initial_zhat.size() != 0 &&
      (initial_zhat.size() != 2 * n || !initial_zhat.allFinite())) {
    throw ValidationError("initial observer state must have 2n finite entries");
  }
  return warnings;
}

TrajectoryLog RunScenario(const SimConfig& cfg) {
  cfg.Validate();
  std::shared_ptr<const ManipulatorModel> nominal = cfg.nominal_model;
  if (!nominal) nominal = std::make_shared<TwoLinkArm>(cfg.nominal);
  std::shared_ptr<const ManipulatorModel> plant = cfg.plant_model;
  if (!plant) plant = std::make_shared<TwoLinkArm>(cfg.plant);

  const ClosedLoop loop(cfg, *nominal, *plant);
  const Layout& layout = loop.layout();
  const long steps = std::lround(cfg.t_end / cfg.dt);
  const long hold_steps =
      cfg.controller.sample_period > 0.0
          ? std::lround(cfg.controller.sample_period / cfg.dt)
          : 0;

  TrajectoryLog log;
  log.dof = layout.n;
  log.has_integral = layout.e0 >= 0;
  log.has_observer = layout.zhat >= 0;
  log.dt = cfg.dt;
  log.rows.reserve(steps / cfg.log_stride + 2);

  Eigen::VectorXd x = loop.InitialState();
  Eigen::VectorXd held;
  for (long k = 0;; ++k) {
    const double t = k * cfg.dt;
    const auto view = loop.Observe(t, x);
    if (hold_steps > 0 && k % hold_steps == 0) held = loop.Control(view);
    if (k % cfg.log_stride == 0) {
      log.rows.push_back(
          loop.Row(t, x, held.size() == 0 ? loop.Control(view) : held, view));
    }
    if (k == steps) break;

    x = Rk4Step(
        [&](double tt, const Eigen::VectorXd& xx) {
          return loop.Derivative(tt, xx, held);
        },
        x, t, cfg.dt);

    const double t_next = (k + 1) * cfg.dt;
    const double speed = x.segment(layout.qd, layout.n).norm();
    if (!x.allFinite() || !(speed <= cfg.divergence_velocity)) {
      throw DivergenceError("closed loop diverged at t = " +
                                TimeString(t_next) + " s (|qd| = " +
                                TimeString(speed) + " rad/s)",
                            t_next);
    }
  }
  return log;
}

Metrics ComputeMetrics(const TrajectoryLog& log, double band) {
  if (log.rows.empty()) throw ValidationError("metrics need a nonempty log");
  const int n = log.dof;
  Metrics m;
  m.band = band;
  m.rms_e1 = Eigen::VectorXd::Zero(n);
  m.steady_state_e1 = Eigen::VectorXd::Zero(n);
  m.max_torque = Eigen::VectorXd::Zero(n);

  const double t0 = log.rows.front().t;
  const double t1 = log.rows.back().t;
  const double window_start = t1 - 0.1 * (t1 - t0);
  int window = 0;
  for (const LogRow& r : log.rows) {
    m.rms_e1 += r.e1.cwiseAbs2();
    m.max_torque = m.max_torque.cwiseMax(r.u.cwiseAbs());
    if (r.t >= window_start) {
      m.steady_state_e1 += r.e1.cwiseAbs();
      ++window;
    }
  }
  m.rms_e1 = (m.rms_e1 / static_cast<double>(log.rows.size())).cwiseSqrt();
  m.steady_state_e1 /= static_cast<double>(window);

  for (std::size_t i = 1; i < log.rows.size(); ++i) {
    const LogRow& a = log.rows[i - 1];
    const LogRow& b = log.rows[i];
    m.energy_u += 0.5 * (b.t - a.t) * (a.u.squaredNorm() + b.u.squaredNorm());
  }

  // Last violation of the band; settled from the next sample on.
  std::optional<std::size_t> last_out;
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    if ((log.rows[i].e1.array().abs() >= band).any()) last_out = i;
  }
  if (!last_out) {
    m.settling_time = t0;
  } else if (*last_out + 1 < log.rows.size()) {
    m.settling_time = log.rows[*last_out + 1].t;
  }
  return m;
}

}  // namespace nrhc
