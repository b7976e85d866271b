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

#include "nrhc/analysis.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "nrhc/errors.h"

namespace nrhc {
namespace {

constexpr double kRouteTolerance = 1e-8;
constexpr double kClusterTolerance = 1e-6;
constexpr double kResidualTolerance = 1e-8;
constexpr double kConvergedCutoff = 1e-6;

// Diagonal balancing by powers of two (Parlett & Reinsch). Returns the
// scaling d such that diag(d)^-1 a diag(d) has rows and columns of
// comparable norm.
Eigen::VectorXd BalanceScaling(const Eigen::MatrixXd& a) {
  constexpr double kRadix = 2.0;
  constexpr double kRadix2 = kRadix * kRadix;
  const auto n = a.rows();
  Eigen::MatrixXd b = a;
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  bool done = false;
  for (int sweep = 0; !done && sweep < 100; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(b(j, i));
        r += std::abs(b(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / kRadix;
      while (c < g) {
        f *= kRadix;
        c *= kRadix2;
      }
      g = r * kRadix;
      while (c > g) {
        f /= kRadix;
        c /= kRadix2;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        d(i) *= f;
        b.row(i) /= f;
        b.col(i) *= f;
      }
    }
  }
  return d;
}

Eigen::MatrixXd Balanced(const Eigen::MatrixXd& a, const Eigen::VectorXd& d) {
  return d.cwiseInverse().asDiagonal() * a * d.asDiagonal();
}

double Scale(std::complex<double> z) { return std::max(1.0, std::abs(z)); }

// Compares two eigenvalue multisets. Repeated values in `reference` are
// grouped and compared through their mean, which stays well conditioned
// when the dense solver splits a defective eigenvalue.
double MultisetMismatch(const Eigen::VectorXcd& dense,
                        const Eigen::VectorXcd& reference) {
  if (dense.size() != reference.size()) {
    return std::numeric_limits<double>::infinity();
  }
  const auto n = reference.size();
  std::vector<bool> ref_used(n, false);
  std::vector<bool> dense_used(n, false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ref_used[i]) continue;
    std::vector<Eigen::Index> cluster;
    for (Eigen::Index j = i; j < n; ++j) {
      if (!ref_used[j] && std::abs(reference(j) - reference(i)) <=
                              kClusterTolerance * Scale(reference(i))) {
        cluster.push_back(j);
        ref_used[j] = true;
      }
    }
    std::complex<double> ref_mean = 0.0;
    for (Eigen::Index j : cluster) ref_mean += reference(j);
    ref_mean /= static_cast<double>(cluster.size());

    std::complex<double> dense_mean = 0.0;
    for (std::size_t c = 0; c < cluster.size(); ++c) {
      Eigen::Index best = -1;
      double best_dist = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < n; ++k) {
        if (dense_used[k]) continue;
        const double dist = std::abs(dense(k) - ref_mean);
        if (dist < best_dist) {
          best_dist = dist;
          best = k;
        }
      }
      dense_used[best] = true;
      dense_mean += dense(best);
      if (cluster.size() > 1) {
        // Split members of a repeated eigenvalue must still stay close.
        worst = std::max(worst, kRouteTolerance * best_dist /
                                    (kClusterTolerance * Scale(ref_mean)));
      }
    }
    dense_mean /= static_cast<double>(cluster.size());
    worst = std::max(worst, std::abs(dense_mean - ref_mean) / Scale(ref_mean));
  }
  return worst;
}

void RequireSpd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError(std::string(what) + " must be square");
  }
  if (!m.allFinite() || !m.isApprox(m.transpose(), 1e-12)) {
    throw ValidationError(std::string(what) + " must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw ValidationError(std::string(what) + " must be positive definite");
  }
}

Eigen::VectorXd SymmetricEigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double SafeRatio(double num, double den) {
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

std::string_view ToString(MatrixKind k) {
  switch (k) {
    case MatrixKind::kABasic:
      return "A_basic";
    case MatrixKind::kBBar:
      return "B_bar";
    case MatrixKind::kBTilde:
      return "B_tilde";
  }
  return "A_basic";
}

Eigen::VectorXcd Eigenvalues(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ValidationError("matrix must be square");
  if (!a.allFinite()) throw ValidationError("matrix has non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> es(Balanced(a, BalanceScaling(a)),
                                         /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue iteration did not converge");
  }
  return es.eigenvalues();
}

StabilityReport Analyze(MatrixKind kind, const Eigen::MatrixXd& a) {
  StabilityReport r;
  r.kind = kind;
  r.matrix = a;
  r.eigenvalues = Eigenvalues(a);
  r.max_real_part = r.eigenvalues.real().maxCoeff();
  r.hurwitz = r.max_real_part < -kHurwitzTolerance;
  return r;
}

Eigen::MatrixXd ClosedLoopA(double h, double q_w, double r_w,
                            const Eigen::MatrixXd& m) {
  if (!(h > 0.0)) throw ValidationError("h must be > 0");
  if (!(q_w > 0.0)) {
    throw ValidationError("q_w must be > 0 (Q positive definite)");
  }
  if (!(r_w >= 0.0)) throw ValidationError("r_w must be >= 0");
  RequireSpd(m, "M");
  const auto n = m.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const double h2 = h * h;
  const Eigen::MatrixXd pbar = q_w * h2 * h2 * id + r_w * m * m;
  const Eigen::MatrixXd pbar_inv = pbar.llt().solve(id);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n) = id;
  a.bottomLeftCorner(n, n) = -q_w * h2 * pbar_inv;
  a.bottomRightCorner(n, n) = -2.0 * q_w * h2 * h * pbar_inv;
  return a;
}

Lemma1Report Lemma1Check(double h, double q_w, double r_w,
                         const Eigen::MatrixXd& m) {
  Lemma1Report out;
  out.report = Analyze(MatrixKind::kABasic, ClosedLoopA(h, q_w, r_w, m));

  const auto n = m.rows();
  const double h2 = h * h;
  const Eigen::VectorXd pbar_eigs = SymmetricEigenvalues(
      q_w * h2 * h2 * Eigen::MatrixXd::Identity(n, n) + r_w * m * m);
  out.factored_eigenvalues.resize(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lb = 1.0 / pbar_eigs(i);
    // s^2 + b s + c = 0 with b = 2 q h^3 lb, c = q h^2 lb.
    const double b = 2.0 * q_w * h2 * h * lb;
    const double c = q_w * h2 * lb;
    const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4.0 * c));
    // Stable root pairing: avoid cancellation in -b + sqrt(disc).
    const std::complex<double> big =
        -0.5 * (b + (disc.real() >= 0.0 ? disc : -disc));
    out.factored_eigenvalues(2 * i) = big;
    out.factored_eigenvalues(2 * i + 1) =
        std::abs(big) > 0.0 ? c / big : std::complex<double>(0.0);
  }
  out.route_mismatch =
      MultisetMismatch(out.report.eigenvalues, out.factored_eigenvalues);
  out.routes_agree = out.route_mismatch <= kRouteTolerance;
  if (!out.routes_agree) {
    std::ostringstream msg;
    msg << "eigenvalue routes disagree for A(h, x1): mismatch "
        << out.route_mismatch;
    throw std::logic_error(msg.str());
  }
  return out;
}

Eigen::MatrixXd BMatrix(const Eigen::MatrixXd& m_true,
                        const Eigen::MatrixXd& m_nom) {
  RequireSpd(m_true, "M");
  RequireSpd(m_nom, "M0");
  if (m_true.rows() != m_nom.rows()) {
    throw ValidationError("M and M0 sizes differ");
  }
  return m_true.llt().solve(m_nom);
}

Eigen::VectorXd BEigenvalues(const Eigen::MatrixXd& b) {
  const Eigen::VectorXcd eig = Eigenvalues(b);
  const double radius = eig.cwiseAbs().maxCoeff();
  Eigen::VectorXd out(eig.size());
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig(i).imag()) > 1e-9 * std::max(1.0, radius) ||
        !(eig(i).real() > 0.0)) {
      std::ostringstream msg;
      msg << "b(x1) eigenvalue " << eig(i) << " is not real positive";
      throw std::logic_error(msg.str());
    }
    out(i) = eig(i).real();
  }
  std::sort(out.data(), out.data() + out.size());
  return out;
}

Eigen::MatrixXd BBar(double h, const Eigen::MatrixXd& b) {
  if (!(h > 0.0)) throw ValidationError("h must be > 0");
  const auto n = b.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = -b / (h * h);
  a.bottomRightCorner(n, n) = -2.0 * b / h;
  return a;
}

Eigen::MatrixXd BTilde(double h, const Eigen::MatrixXd& b) {
  if (!(h > 0.0)) throw ValidationError("h must be > 0");
  const auto n = b.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  a.block(0, n, n, n).setIdentity();
  a.block(n, 2 * n, n, n).setIdentity();
  a.block(2 * n, 0, n, n) = -(12.0 / (5.0 * h * h * h)) * b;
  a.block(2 * n, n, n, n) = -(18.0 / (5.0 * h * h)) * b;
  a.block(2 * n, 2 * n, n, n) = -(12.0 / (5.0 * h)) * b;
  return a;
}

Lemma2Report Lemma2CheckFromB(const Eigen::MatrixXd& b, double h) {
  Lemma2Report out;
  out.report = Analyze(MatrixKind::kBTilde, BTilde(h, b));
  out.b_eigenvalues = BEigenvalues(b);
  // b = (I + eps)^-1, so the eigenvalues of eps are 1/lb - 1.
  out.lambda_max_eps = 1.0 / out.b_eigenvalues.minCoeff() - 1.0;
  out.eps_condition = out.lambda_max_eps < 2.6;
  out.b_condition = out.b_eigenvalues.minCoeff() > 5.0 / 18.0;
  out.consistent = out.eps_condition == out.b_condition &&
                   out.b_condition == out.report.hurwitz;
  return out;
}

Lemma2Report Lemma2Check(const Eigen::MatrixXd& m_true,
                         const Eigen::MatrixXd& m_nom, double h) {
  Lemma2Report out = Lemma2CheckFromB(BMatrix(m_true, m_nom), h);
  // eps = M0^-1 dM has the real spectrum of the pencil (dM, M0).
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      m_true - m_nom, m_nom, Eigen::EigenvaluesOnly);
  out.lambda_max_eps = ges.eigenvalues().maxCoeff();
  out.eps_condition = out.lambda_max_eps < 2.6;
  out.consistent = out.eps_condition == out.b_condition &&
                   out.b_condition == out.report.hurwitz;
  return out;
}

double LyapunovResidual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p,
                        const Eigen::MatrixXd& q) {
  return (a.transpose() * p + p * a + q).norm() / q.norm();
}

Eigen::MatrixXd LyapunovSolve(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& q) {
  if (a.rows() != a.cols() || q.rows() != a.rows() || q.cols() != a.cols()) {
    throw ValidationError("A and Q must be square and of equal size");
  }
  RequireSpd(q, "Q");
  const Eigen::VectorXcd eig = Eigenvalues(a);
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (!(eig(i).real() < -kHurwitzTolerance)) {
      std::ostringstream msg;
      msg << "Lyapunov solve needs a Hurwitz matrix; eigenvalue " << eig(i)
          << " is not in the open left half plane";
      throw ValidationError(msg.str());
    }
  }

  // Work on diag(d)^-1 A diag(d); the weight transforms as diag(d) Q diag(d).
  const Eigen::VectorXd d = BalanceScaling(a);
  const Eigen::MatrixXd ab = Balanced(a, d);
  const Eigen::MatrixXd qb = d.asDiagonal() * q * d.asDiagonal();

  const auto m = a.rows();
  const auto unknowns = m * (m + 1) / 2;
  auto index = [m](Eigen::Index i, Eigen::Index j) {
    if (i > j) std::swap(i, j);
    return i * m - i * (i - 1) / 2 + (j - i);
  };
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::VectorXd rhs(unknowns);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const auto row = index(i, j);
      // (A' P + P A)_ij = sum_k A_ki P_kj + P_ik A_kj.
      for (Eigen::Index k = 0; k < m; ++k) {
        lhs(row, index(k, j)) += ab(k, i);
        lhs(row, index(i, k)) += ab(k, j);
      }
      rhs(row) = -qb(i, j);
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  Eigen::VectorXd x = lu.solve(rhs);
  x += lu.solve(rhs - lhs * x);  // one refinement step

  Eigen::MatrixXd pb(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) pb(i, j) = pb(j, i) = x(index(i, j));
  }
  const Eigen::MatrixXd dinv = d.cwiseInverse().asDiagonal();
  Eigen::MatrixXd p = dinv * pb * dinv;
  p = 0.5 * (p + p.transpose()).eval();

  const double balanced_residual = LyapunovResidual(ab, pb, qb);
  if (!(balanced_residual <= kResidualTolerance)) {
    std::ostringstream msg;
    msg << "Lyapunov residual " << balanced_residual << " exceeds tolerance";
    throw std::logic_error(msg.str());
  }
  if (Eigen::LLT<Eigen::MatrixXd>(p).info() != Eigen::Success) {
    throw std::logic_error("Lyapunov solution is not positive definite");
  }
  return p;
}

Eigen::VectorXd LumpedUncertainty(
    const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
    const Eigen::VectorXd& qddref, const ManipulatorModel& nominal,
    const ManipulatorModel& plant,
    const std::optional<FrictionParams>& friction) {
  const Eigen::MatrixXd m = plant.Inertia(q);
  const Eigen::MatrixXd dm = m - nominal.Inertia(q);
  const Eigen::MatrixXd dc = plant.Coriolis(q, qd) - nominal.Coriolis(q, qd);
  const Eigen::VectorXd dg = plant.Gravity(q) - nominal.Gravity(q);
  Eigen::VectorXd rhs = dm * qddref + dc * qd + dg;
  if (friction) rhs += FrictionTorque(q, qd, *friction);
  return -SolveInertia(m, rhs);
}

SteadyStateDiagnostic PredictSteadyState(
    const TrajectoryLog& log, const ManipulatorModel& nominal,
    const ManipulatorModel& plant,
    const std::optional<FrictionParams>& friction, double h) {
  if (log.rows.empty()) throw ValidationError("diagnostic needs a nonempty log");
  const LogRow& last = log.rows.back();
  SteadyStateDiagnostic d;
  d.v = LumpedUncertainty(last.q, last.qd, last.qddref, nominal, plant,
                          friction);
  const Eigen::MatrixXd b =
      BMatrix(plant.Inertia(last.q), nominal.Inertia(last.q));
  const Eigen::VectorXd binv_v = b.partialPivLu().solve(d.v);
  d.integral = log.has_integral;
  if (d.integral) {
    d.predicted = (5.0 * h * h * h / 12.0) * binv_v;
    d.observed = last.e0;
  } else {
    d.predicted = h * h * binv_v;
    d.observed = last.e1;
  }
  d.relative_gap = (d.predicted - d.observed).norm() /
                   std::max(d.observed.norm(), 1e-300);
  return d;
}

UncertaintyBounds EstimateGains(const TrajectoryLog& log,
                                const ManipulatorModel& nominal,
                                const ManipulatorModel& plant,
                                const std::optional<FrictionParams>& friction) {
  UncertaintyBounds ub;
  ub.min_inertia_eig = std::numeric_limits<double>::infinity();
  ub.all_converged = true;
  for (const LogRow& row : log.rows) {
    const Eigen::MatrixXd m = plant.Inertia(row.q);
    const Eigen::MatrixXd dm = m - nominal.Inertia(row.q);
    const Eigen::MatrixXd dc =
        plant.Coriolis(row.q, row.qd) - nominal.Coriolis(row.q, row.qd);
    const Eigen::VectorXd dg = plant.Gravity(row.q) - nominal.Gravity(row.q);
    const Eigen::VectorXd fr =
        friction ? FrictionTorque(row.q, row.qd, *friction)
                 : Eigen::VectorXd::Zero(log.dof);
    const Eigen::VectorXd v = LumpedUncertainty(row.q, row.qd, row.qddref,
                                                nominal, plant, friction);

    ub.m_bar = std::max(ub.m_bar, dm.operatorNorm());
    ub.c_bar = std::max(ub.c_bar, dc.operatorNorm());
    ub.g_bar = std::max(ub.g_bar, dg.norm());
    ub.f_bar = std::max(ub.f_bar, fr.norm());
    ub.v_max = std::max(ub.v_max, v.norm());
    ub.min_inertia_eig =
        std::min(ub.min_inertia_eig, SymmetricEigenvalues(m).minCoeff());

    const double e_norm =
        std::sqrt(row.e1.squaredNorm() + row.e2.squaredNorm());
    if (e_norm <= kConvergedCutoff) continue;
    ub.all_converged = false;
    ++ub.samples_used;
    ub.gamma = std::max(ub.gamma, v.norm() / e_norm);
    const double e_full = std::sqrt(e_norm * e_norm + row.e0.squaredNorm());
    ub.gamma_integral = std::max(ub.gamma_integral, v.norm() / e_full);
    const Eigen::VectorXd drift = DriftTerm(nominal, JointState{row.q, row.qd});
    ub.mu = std::max(ub.mu, (drift - row.qddref).norm() / e_norm);
  }
  if (log.rows.empty()) ub.min_inertia_eig = 0.0;
  ub.m_bar_below_inertia = ub.m_bar <= ub.min_inertia_eig;
  return ub;
}

TheoremBound TheoremBounds(const TheoremInputs& in, const UncertaintyBounds& ub,
                           int which) {
  if (which < 1 || which > 3) throw ValidationError("theorem must be 1, 2 or 3");
  TheoremBound out;
  out.theorem = which;
  const auto n = in.m_nom.rows();
  Eigen::MatrixXd a;
  if (which == 1) {
    a = ClosedLoopA(in.h, in.q_w, in.r_w, in.m_nom);
    out.report = Analyze(MatrixKind::kABasic, a);
  } else {
    const Eigen::MatrixXd b = BMatrix(in.m_true, in.m_nom);
    a = which == 2 ? BBar(in.h, b) : BTilde(in.h, b);
    out.report = Analyze(which == 2 ? MatrixKind::kBBar : MatrixKind::kBTilde, a);
  }
  const Eigen::MatrixXd qw =
      in.q_lyap.size() == 0
          ? Eigen::MatrixXd::Identity(a.rows(), a.cols()).eval()
          : in.q_lyap;
  const Eigen::MatrixXd p = LyapunovSolve(a, qw);
  out.report.lyapunov_p = p;
  const double q_min = SymmetricEigenvalues(qw).minCoeff();
  const double p_max = SymmetricEigenvalues(p).maxCoeff();

  if (which == 1) {
    out.gain = ub.mu;
    if (in.r_w == 0.0) {
      out.threshold = out.threshold_stmt =
          std::numeric_limits<double>::infinity();
    } else {
      const double h2 = in.h * in.h;
      const Eigen::VectorXd pbar = SymmetricEigenvalues(
          in.q_w * h2 * h2 * Eigen::MatrixXd::Identity(n, n) +
          in.r_w * in.m_nom * in.m_nom);
      const double den = 2.0 * in.r_w * in.m_upper * in.m_upper * p_max;
      out.threshold = SafeRatio(q_min * pbar.minCoeff(), den);
      out.threshold_stmt = SafeRatio(q_min * pbar.maxCoeff(), den);
    }
  } else {
    out.gain = which == 2 ? ub.gamma : ub.gamma_integral;
    out.threshold = out.threshold_stmt = q_min / (2.0 * p_max);
  }
  out.margin = out.threshold - out.gain;
  out.report.threshold = out.threshold;
  out.report.margin = out.margin;
  return out;
}

}  // namespace nrhc
