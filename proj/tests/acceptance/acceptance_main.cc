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

// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nrhc/analysis.h"
#include "nrhc/control.h"
#include "nrhc/dynamics.h"
#include "nrhc/errors.h"
#include "nrhc/format.h"
#include "nrhc/scenario.h"
#include "nrhc/sim.h"

namespace nrhc {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

std::string Vec(const Eigen::VectorXd& v) {
  std::string s = "(";
  for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + Sci(v(i));
  return s + ")";
}

std::string Scenario(const std::string& name) {
  return std::string(NRHC_SCENARIO_DIR) + "/" + name + ".scenario";
}

SimConfig Load(const std::string& name, const std::vector<Override>& ov = {}) {
  return ParseConfigFile(Scenario(name), ov).sim;
}

double RelErr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

Eigen::MatrixXd RandomSpd(std::mt19937_64& rng, double lo, double hi) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::Matrix2d a;
  a << g(rng), g(rng), g(rng), g(rng);
  const Eigen::Matrix2d v = Eigen::HouseholderQR<Eigen::Matrix2d>(a).householderQ();
  return v * Eigen::Vector2d(u(rng), u(rng)).asDiagonal() * v.transpose();
}

Metrics RunMetrics(const SimConfig& cfg) {
  return ComputeMetrics(RunScenario(cfg), 1e-3);
}

Outcome DynamicsConsistency() {
  SimConfig cfg;
  cfg.controller_enabled = false;
  cfg.reference.amplitude = 0.0;
  cfg.t_end = 5.0;
  cfg.log_stride = 100;
  cfg.initial.q = Eigen::Vector2d(0.3, -0.7);
  const TrajectoryLog log = RunScenario(cfg);
  const TwoLinkArm arm(cfg.plant);
  const double e0 = TotalEnergy(arm, {log.rows.front().q, log.rows.front().qd});
  double drift = 0.0;
  for (const LogRow& r : log.rows) {
    drift = std::max(drift, std::abs(TotalEnergy(arm, {r.q, r.qd}) - e0));
  }
  drift /= std::abs(e0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-M_PI, M_PI);
  double grad = 0.0;
  const double step = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector2d q(a(rng), a(rng));
    Eigen::Vector2d fd;
    for (int i = 0; i < 2; ++i) {
      Eigen::Vector2d qp = q, qm = q;
      qp(i) += step;
      qm(i) -= step;
      fd(i) = (arm.Potential(qp) - arm.Potential(qm)) / (2 * step);
    }
    grad = std::max(grad, RelErr(fd, arm.Gravity(q)));
  }
  return {drift < 1e-6 && grad < 1e-6,
          "energy drift " + Sci(drift) + " rel over 5 s, gravity vs gradient " +
              Sci(grad) + " rel at 100 configurations"};
}

Outcome ComputedTorqueLimit() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(-3, 3), logh(-4, -1);
  const TwoLinkArm arm(RobotParams::TwoLinkTable());
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const JointState s{Eigen::Vector2d(a(rng), a(rng)),
                       Eigen::Vector2d(a(rng), a(rng))};
    const RefState ref{Eigen::Vector2d(a(rng), a(rng)),
                       Eigen::Vector2d(a(rng), a(rng)),
                       Eigen::Vector2d(a(rng), a(rng))};
    const TrackingError err{{}, s.q - ref.qref, s.qd - ref.qdref};
    ControllerParams cp;
    cp.r_w = 0.0;
    cp.h = std::pow(10.0, logh(rng));
    const Eigen::VectorXd u1 =
        NrhcTorque(err, DriftTerm(arm, s), ref.qddref, arm.Inertia(s.q), cp);
    worst = std::max(worst, RelErr(u1, ComputedTorque(err, s, ref, arm, cp.h)));
  }
  return {worst < 1e-9, "max relative gap " + Sci(worst) + " over 200 samples"};
}

Outcome IntegralReduction() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(-3, 3), logh(-4, -1);
  const TwoLinkArm arm(RobotParams::TwoLinkTable());
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector2d q(a(rng), a(rng)), qd(a(rng), a(rng));
    const Eigen::Vector2d qddref(a(rng), a(rng));
    const TrackingError err{0.1 * Eigen::Vector2d(a(rng), a(rng)),
                            Eigen::Vector2d(a(rng), a(rng)),
                            Eigen::Vector2d(a(rng), a(rng))};
    const double h = std::pow(10.0, logh(rng));
    const Eigen::MatrixXd m0 = arm.Inertia(q);
    const Eigen::VectorXd f = DriftTerm(arm, {q, qd});
    const Eigen::VectorXd closed_form =
        -(9.0 / 5.0) * m0 *
        (4.0 / (3.0 * h * h * h) * err.e0 + 2.0 / (h * h) * err.e1 +
         4.0 / (3.0 * h) * err.e2 + (5.0 / 9.0) * (f - qddref));
    ControllerParams cp;
    cp.r_w = 0.0;
    cp.h = h;
    worst = std::max(worst,
                     RelErr(NrhcIntegralTorque(err, f, qddref, m0, cp), closed_form));
  }
  return {worst < 1e-9, "max relative gap " + Sci(worst) + " over 200 samples"};
}

Outcome Lemma1AtScale() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> logh(-4, -1), logq(0, 8), r01(0, 1);
  double max_re = -std::numeric_limits<double>::infinity();
  double mismatch = 0.0;
  int bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const double h = std::pow(10.0, logh(rng));
    const double q = std::pow(10.0, logq(rng));
    const double r = r01(rng);
    try {
      const Lemma1Report rep = Lemma1Check(h, q, r, RandomSpd(rng, 0.1, 50));
      max_re = std::max(max_re, rep.report.max_real_part);
      mismatch = std::max(mismatch, rep.route_mismatch);
      if (!(rep.report.max_real_part < 0.0)) ++bad;
    } catch (const std::logic_error&) {
      ++bad;
    }
  }
  return {bad == 0 && mismatch <= 1e-8,
          std::to_string(bad) + " of 1000 draws with Re >= 0, largest Re " +
              Sci(max_re) + ", route mismatch " + Sci(mismatch)};
}

Outcome Lemma2Boundary() {
  bool ok = true;
  std::string detail;
  for (double h : {1.0, 1e-3}) {
    auto verdict = [&](double lb) {
      return Analyze(MatrixKind::kBTilde,
                     BTilde(h, Eigen::MatrixXd::Constant(1, 1, lb)));
    };
    const StabilityReport at = verdict(5.0 / 18);
    const bool below = verdict(5.0 / 18 - 0.01).hurwitz;
    const bool above = verdict(5.0 / 18 + 0.01).hurwitz;
    ok = ok && std::abs(at.max_real_part) < 1e-8 && !below && above;
    detail += (detail.empty() ? "" : "; ") + std::string("h = ") + Sci(h) +
              ": |Re| at 5/18 = " + Sci(std::abs(at.max_real_part)) +
              ", 5/18-0.01 " + (below ? "Hurwitz" : "not Hurwitz") +
              ", 5/18+0.01 " + (above ? "Hurwitz" : "not Hurwitz");
  }
  return {ok, detail};
}

Outcome MatchedTracking() {
  const SimConfig weighted = Load("matched");
  SimConfig exact = weighted;
  exact.controller.r_w = 0.0;
  const Metrics mp = RunMetrics(weighted);
  const Metrics me = RunMetrics(exact);
  const bool bounded =
      mp.steady_state_e1.maxCoeff() < 1e-3 && mp.steady_state_e1.minCoeff() > 0;
  const bool smaller = (me.steady_state_e1.array() < mp.steady_state_e1.array()).all();
  return {bounded && smaller, "steady-state |e1| " + Vec(mp.steady_state_e1) +
                                  " rad, with r_w = 0 " + Vec(me.steady_state_e1)};
}

Outcome RobustnessComparison() {
  const Metrics matched = RunMetrics(Load("matched"));
  const Metrics basic = RunMetrics(Load("mismatched"));
  const Eigen::ArrayXd ratio =
      basic.steady_state_e1.array() / matched.steady_state_e1.array();
  const bool worse = (ratio >= 10.0).all();
  std::string detail = "basic/matched steady-state ratio " +
                       Vec(ratio.matrix()) + "; ";
  bool integral_ok = false;
  try {
    const Metrics integral = RunMetrics(Load("integral"));
    const bool small = integral.steady_state_e1.maxCoeff() < 1e-3;
    const bool gentler =
        integral.max_torque.maxCoeff() < basic.max_torque.maxCoeff();
    integral_ok = small && gentler;
    detail += "integral steady-state " + Vec(integral.steady_state_e1) +
              " rad, peak torque " + Sci(integral.max_torque.maxCoeff()) +
              " vs basic " + Sci(basic.max_torque.maxCoeff()) + " N m";
  } catch (const DivergenceError& e) {
    const SimConfig cfg = Load("integral");
    const Lemma2Report l2 = Lemma2Check(MassMatrix(cfg.initial.q, cfg.plant),
                                        MassMatrix(cfg.initial.q, cfg.nominal),
                                        cfg.controller.h);
    detail += "integral run diverged at t = " + Sci(e.time()) +
              " s; lambda_max(eps) = " + Sci(l2.lambda_max_eps) +
              " at q(0) violates the < 2.6 stability condition";
  }
  return {worse && integral_ok, detail};
}

Outcome ObserverInTheLoop() {
  SimConfig cfg = Load("observer");
  cfg.log_stride = 1;
  const TrajectoryLog log = RunScenario(cfg);
  double settled = 0.0;
  for (const LogRow& r : log.rows) {
    const double err =
        std::max(std::abs(r.est_err(1)), std::abs(r.est_err(3)));
    if (err >= 1e-3) settled = r.t + log.dt;
  }
  const Metrics m = ComputeMetrics(log, 1e-3);
  const bool fast = settled <= 1.0;
  const bool tracks = m.steady_state_e1.maxCoeff() < 2e-3;
  return {fast && tracks,
          "velocity estimate error below 1e-3 rad/s from t = " + Sci(settled) +
              " s, steady-state |e1| " + Vec(m.steady_state_e1) + " rad"};
}

// Largest error of the chained prediction at t + h and t + 2h against the
// plant integrated finely under constant torque.
double PredictionError(double h) {
  const TwoLinkArm arm(RobotParams::TwoLinkTable());
  const JointState s{Eigen::Vector2d(0.4, -0.3), Eigen::Vector2d(0.8, -0.5)};
  const RefState ref{Eigen::Vector2d(0.35, -0.25), Eigen::Vector2d(0.6, -0.2),
                     Eigen::Vector2d(1.5, -2.0)};
  const Eigen::Vector2d u(60.0, 10.0);
  const TrackingError err{{}, s.q - ref.qref, s.qd - ref.qdref};
  const auto [p1, p2] =
      PredictError(err, DriftTerm(arm, s), ref.qddref, u,
                   arm.Inertia(s.q).inverse(), h);

  const Derivative f = [&](double, const Eigen::VectorXd& x) {
    const JointState js{x.head(2), x.tail(2)};
    Eigen::VectorXd dx(4);
    dx << js.qd, ForwardDynamics(arm, js, u);
    return dx;
  };
  Eigen::VectorXd x(4);
  x << s.q, s.qd;
  const int sub = 200;
  const double dt = h / sub;
  double worst = 0.0;
  for (int k = 1; k <= 2 * sub; ++k) {
    x = Rk4Step(f, x, (k - 1) * dt, dt);
    if (k % sub) continue;
    const double tau = k * dt;
    const Eigen::VectorXd qref =
        ref.qref + tau * ref.qdref + 0.5 * tau * tau * ref.qddref;
    const Eigen::VectorXd e = x.head(2) - qref;
    worst = std::max(worst, (e - (k == sub ? p1 : p2)).norm());
  }
  return worst;
}

double OscillatorError(double dt) {
  const Derivative f = [](double, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(Eigen::Vector2d(x(1), -x(0)));
  };
  Eigen::VectorXd x = Eigen::Vector2d(1, 0);
  const int steps = static_cast<int>(std::lround(1.0 / dt));
  for (int k = 0; k < steps; ++k) x = Rk4Step(f, x, k * dt, dt);
  return std::abs(x(0) - std::cos(1.0));
}

Outcome QuadratureAndTaylorOrders() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> a(-2, 2);
  double simpson = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double c0 = a(rng), c1 = a(rng), c2 = a(rng), c3 = a(rng);
    const double t = a(rng), h = 0.1 + std::abs(a(rng));
    auto p = [&](double x) { return c0 + x * (c1 + x * (c2 + x * c3)); };
    auto prim = [&](double x) {
      return x * (c0 + x * (c1 / 2 + x * (c2 / 3 + x * c3 / 4)));
    };
    const double exact = prim(t + 2 * h) - prim(t);
    const double scale = std::abs(prim(t + 2 * h)) + std::abs(prim(t)) + 1.0;
    simpson = std::max(simpson,
                       std::abs(SimpsonRule(p(t), p(t + h), p(t + 2 * h), h) -
                                exact) / scale);
  }
  double predict_order = std::numeric_limits<double>::infinity();
  double prev = PredictionError(1e-2);
  for (double h : {5e-3, 2.5e-3, 1.25e-3}) {
    const double e = PredictionError(h);
    predict_order = std::min(predict_order, std::log2(prev / e));
    prev = e;
  }
  const double rk4_order = std::log2(OscillatorError(0.1) / OscillatorError(0.05));
  const bool ok = simpson < 64 * std::numeric_limits<double>::epsilon() &&
                  predict_order >= 1.9 && rk4_order >= 3.9;
  return {ok, "Simpson cubic error " + Sci(simpson) +
                  " rel, predict_error order " + Sci(predict_order) +
                  ", rk4 order " + Sci(rk4_order)};
}

Outcome HSweep() {
  const std::vector<double> hs = {0.0005, 0.001, 0.005, 0.01, 0.05};
  std::vector<std::optional<Eigen::VectorXd>> ss;
  std::string detail = "steady-state |e1| by h:";
  for (double h : hs) {
    try {
      const Metrics m = RunMetrics(Load("mismatched", {{"controller.h", FormatDouble(h)}}));
      ss.push_back(m.steady_state_e1);
      detail += " " + Sci(h) + " -> " + Vec(m.steady_state_e1) + ";";
    } catch (const DivergenceError& e) {
      ss.push_back(std::nullopt);
      detail += " " + Sci(h) + " -> diverged at t = " + Sci(e.time()) + " s;";
    }
  }
  bool monotone = true;
  for (size_t i = 2; i < hs.size(); ++i) {
    if (ss[i] && ss[i - 1]) {
      monotone = monotone && (ss[i]->array() >= ss[i - 1]->array()).all();
    }
  }
  const bool aborted = !ss.back().has_value();
  detail += std::string(" monotone from 0.001: ") + (monotone ? "yes" : "no") +
            ", abort at largest h: " + (aborted ? "yes" : "no");
  return {monotone && aborted, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace nrhc

int main() {
  using namespace nrhc;
  const std::vector<Criterion> criteria = {
      {1, "Dynamics consistency", 5, DynamicsConsistency},
      {2, "Computed-torque limit identity", 1, ComputedTorqueLimit},
      {3, "Integral-law reduction", 1, IntegralReduction},
      {4, "Lemma 1 at scale", 10, Lemma1AtScale},
      {5, "Lemma 2 boundary", 1, Lemma2Boundary},
      {6, "Matched tracking", 30, MatchedTracking},
      {7, "Robustness comparison", 60, RobustnessComparison},
      {8, "Observer in the loop", 30, ObserverInTheLoop},
      {9, "Simpson and Taylor orders", 5, QuadratureAndTaylorOrders},
      {10, "h-sweep qualitative claim", 120, HSweep},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name
              << ": " << o.detail << " (" << Sci(secs) << " s, budget "
              << c.budget_s << " s" << (in_time ? "" : ", exceeded") << ")\n";
  }
  std::cout << (criteria.size() - failures) << " of " << criteria.size()
            << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
