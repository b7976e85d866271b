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

#ifndef NRHC_ANALYSIS_H_
#define NRHC_ANALYSIS_H_

#include <limits>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "nrhc/dynamics.h"
#include "nrhc/trajectory_log.h"

namespace nrhc {

// Real parts at or above -kHurwitzTolerance count as unstable.
inline constexpr double kHurwitzTolerance = 1e-10;

enum class MatrixKind { kABasic, kBBar, kBTilde };
std::string_view ToString(MatrixKind k);

struct StabilityReport {
  MatrixKind kind = MatrixKind::kABasic;
  Eigen::MatrixXd matrix;
  Eigen::VectorXcd eigenvalues;
  double max_real_part = 0.0;
  bool hurwitz = false;
  std::optional<Eigen::MatrixXd> lyapunov_p;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  double margin = std::numeric_limits<double>::quiet_NaN();
};

// Dense eigenvalues after a diagonal balancing similarity.
Eigen::VectorXcd Eigenvalues(const Eigen::MatrixXd& a);

// Eigenvalues, max real part and the Hurwitz verdict for `a`.
StabilityReport Analyze(MatrixKind kind, const Eigen::MatrixXd& a);

// A(h, x1) = [0 I; -q h^2 Pbar^-1  -2 q h^3 Pbar^-1], Pbar = q h^4 I + r M^2.
Eigen::MatrixXd ClosedLoopA(double h, double q_w, double r_w,
                            const Eigen::MatrixXd& m);

struct Lemma1Report {
  StabilityReport report;
  // Roots of s^2 + 2 q h^3 lb s + q h^2 lb = 0 for each eigenvalue lb of
  // Pbar^-1.
  Eigen::VectorXcd factored_eigenvalues;
  // Largest scaled distance between the two eigenvalue multisets.
  double route_mismatch = 0.0;
  bool routes_agree = false;
};

// Computes the eigenvalues of A(h, x1) by a dense solve and by the per-mode
// quadratic factorization. Throws std::logic_error if they disagree.
Lemma1Report Lemma1Check(double h, double q_w, double r_w,
                         const Eigen::MatrixXd& m);

// b(x1) = M^-1 M0. Throws ValidationError unless both inputs are SPD.
Eigen::MatrixXd BMatrix(const Eigen::MatrixXd& m_true,
                        const Eigen::MatrixXd& m_nom);

// Eigenvalues of b; throws std::logic_error if any is not real positive to
// within 1e-9 (relative to the spectral radius).
Eigen::VectorXd BEigenvalues(const Eigen::MatrixXd& b);

// [0 I; -b/h^2 -2b/h].
Eigen::MatrixXd BBar(double h, const Eigen::MatrixXd& b);

// [0 I 0; 0 0 I; -(12/5h^3) b  -(18/5h^2) b  -(12/5h) b].
Eigen::MatrixXd BTilde(double h, const Eigen::MatrixXd& b);

struct Lemma2Report {
  StabilityReport report;  // of BTilde
  double lambda_max_eps = 0.0;  // largest eigenvalue of M0^-1 (M - M0)
  Eigen::VectorXd b_eigenvalues;
  bool eps_condition = false;  // lambda_max_eps < 2.6
  bool b_condition = false;    // every eigenvalue of b > 5/18
  bool consistent = false;     // all three verdicts agree
};

Lemma2Report Lemma2Check(const Eigen::MatrixXd& m_true,
                         const Eigen::MatrixXd& m_nom, double h);

// Same checks for a given b (used for scalar sweeps).
Lemma2Report Lemma2CheckFromB(const Eigen::MatrixXd& b, double h);

// Solves A' P + P A = -Q over the symmetric unknowns. Throws
// ValidationError if A is not Hurwitz (naming the offending eigenvalue) or
// Q is not SPD, and std::logic_error if the result fails its residual or
// definiteness checks.
Eigen::MatrixXd LyapunovSolve(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& q);

// ||A' P + P A + Q|| / ||Q|| (Frobenius).
double LyapunovResidual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p,
                        const Eigen::MatrixXd& q);

// v = -M^-1 (dM qddref + dC qd + dG + friction) with dX = plant - nominal.
Eigen::VectorXd LumpedUncertainty(const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qd,
                                  const Eigen::VectorXd& qddref,
                                  const ManipulatorModel& nominal,
                                  const ManipulatorModel& plant,
                                  const std::optional<FrictionParams>& friction);

// Equilibrium offsets implied by the error dynamics at the final logged
// state: e1 = h^2 b^-1 v for the basic law, e0 = (5 h^3 / 12) b^-1 v for
// the integral law. Reported next to the observed values, not asserted.
struct SteadyStateDiagnostic {
  bool integral = false;
  Eigen::VectorXd v;
  Eigen::VectorXd predicted;
  Eigen::VectorXd observed;  // e1, or e0 for the integral law
  double relative_gap = 0.0;
};

SteadyStateDiagnostic PredictSteadyState(
    const TrajectoryLog& log, const ManipulatorModel& nominal,
    const ManipulatorModel& plant,
    const std::optional<FrictionParams>& friction, double h);

struct UncertaintyBounds {
  double m_bar = 0.0;  // max ||M - M0||
  double c_bar = 0.0;  // max ||C - C0||
  double g_bar = 0.0;  // max ||G - G0||
  double f_bar = 0.0;  // max ||friction||
  double gamma = 0.0;  // max ||v|| / ||(e1, e2)||
  double gamma_integral = 0.0;  // max ||v|| / ||(e0, e1, e2)||
  double mu = 0.0;     // max ||f0(x) - qddref|| / ||(e1, e2)||
  double v_max = 0.0;  // max ||v||
  double min_inertia_eig = 0.0;  // min eigenvalue of the plant M over the log
  bool m_bar_below_inertia = false;
  int samples_used = 0;
  // Set when no sample had ||e|| above the cutoff; gains are then 0.
  bool all_converged = false;
};

// Evaluates the lumped uncertainty
//   v = -M^-1 (dM qddref + dC qd + dG + friction)
// along a log and reports the largest gain ratios over samples with
// ||e|| > 1e-6. Pass `friction` = nullopt for a frictionless plant.
UncertaintyBounds EstimateGains(const TrajectoryLog& log,
                                const ManipulatorModel& nominal,
                                const ManipulatorModel& plant,
                                const std::optional<FrictionParams>& friction);

// Inputs to the frozen-state sufficient conditions.
struct TheoremInputs {
  double h = 1e-3;
  double q_w = 1.0;
  double r_w = 0.0;
  Eigen::MatrixXd m_nom;   // M0 at the frozen state
  Eigen::MatrixXd m_true;  // plant M at the frozen state
  double m_upper = 0.0;    // upper inertia bound over the workspace
  Eigen::MatrixXd q_lyap;  // Lyapunov weight; empty means identity
};

struct TheoremBound {
  int theorem = 1;
  // Theorem 1 has two readings of its right-hand side: `threshold` uses
  // lambda_min(Pbar) (consistent with the proof steps), `threshold_stmt`
  // uses lambda_max(Pbar). Theorems 2 and 3 set both to the same value.
  double threshold = 0.0;
  double threshold_stmt = 0.0;
  double gain = 0.0;  // mu for theorem 1, gamma otherwise
  double margin = 0.0;
  StabilityReport report;
};

// Theorem 1: mu < lmin(QA) lmin(Pbar) / (2 r Mbar^2 lmax(PA)), +inf at r = 0.
// Theorem 2: gamma < lmin(QB) / (2 lmax(PB)) for BBar.
// Theorem 3: gamma < lmin(Q) / (2 lmax(P)) for BTilde.
TheoremBound TheoremBounds(const TheoremInputs& in, const UncertaintyBounds& ub,
                           int which);

}  // namespace nrhc

#endif  // NRHC_ANALYSIS_H_
