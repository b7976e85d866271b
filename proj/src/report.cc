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

#include "nrhc/report.h"

#include <fstream>
#include <sstream>

#include "nrhc/errors.h"
#include "nrhc/format.h"

namespace nrhc {
namespace {

void Append(std::vector<std::string>* cols, const std::string& stem, int n,
            const std::string& sep = "") {
  for (int i = 1; i <= n; ++i) cols->push_back(stem + sep + std::to_string(i));
}

void Row(std::ostringstream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << cells[i];
  }
  out << '\n';
}

void Push(std::vector<std::string>* cells, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) cells->push_back(FormatDouble(v(i)));
}

std::string Quote(const std::string& s) { return "'" + s + "'"; }

}  // namespace

std::vector<std::string> TrajectoryColumns(const TrajectoryLog& log) {
  const int n = log.dof;
  std::vector<std::string> cols = {"t"};
  Append(&cols, "q", n);
  Append(&cols, "qd", n);
  Append(&cols, "qref", n);
  Append(&cols, "e1", n, "_");
  Append(&cols, "u", n);
  if (log.has_integral) Append(&cols, "e0", n, "_");
  if (log.has_observer) {
    Append(&cols, "qhat", n, "_");
    Append(&cols, "qdhat", n, "_");
  }
  return cols;
}

std::string TrajectoryCsv(const std::string& header, const TrajectoryLog& log) {
  std::ostringstream out;
  out << header;
  Row(out, TrajectoryColumns(log));
  const int n = log.dof;
  std::vector<std::string> cells;
  for (const LogRow& r : log.rows) {
    cells.clear();
    cells.push_back(FormatDouble(r.t));
    Push(&cells, r.q);
    Push(&cells, r.qd);
    Push(&cells, r.qref);
    Push(&cells, r.e1);
    Push(&cells, r.u);
    if (log.has_integral) Push(&cells, r.e0);
    if (log.has_observer) {
      for (int i = 0; i < n; ++i) cells.push_back(FormatDouble(r.zhat(2 * i)));
      for (int i = 0; i < n; ++i) {
        cells.push_back(FormatDouble(r.zhat(2 * i + 1)));
      }
    }
    Row(out, cells);
  }
  return out.str();
}

std::string MetricsCsv(const std::string& header,
                       const std::vector<RunSummary>& runs) {
  const int n = runs.empty() ? 0 : runs.front().dof;
  std::vector<std::string> cols = {"scenario", "status", "divergence_time"};
  Append(&cols, "rms_e1_", n);
  Append(&cols, "steady_state_e1_", n);
  Append(&cols, "max_torque_", n);
  cols.insert(cols.end(), {"settling_time", "settling_band", "energy_u",
                           "torque_limit", "torque_limit_exceeded",
                           "ss_predicted_kind"});
  Append(&cols, "ss_predicted_", n);
  Append(&cols, "ss_observed_", n);

  std::ostringstream out;
  out << header;
  Row(out, cols);
  const std::string nan = FormatDouble(std::numeric_limits<double>::quiet_NaN());
  for (const RunSummary& s : runs) {
    std::vector<std::string> cells = {s.name,
                                      s.metrics ? "ok" : "diverged",
                                      s.divergence_time
                                          ? FormatDouble(*s.divergence_time)
                                          : nan};
    if (s.metrics) {
      const Metrics& m = *s.metrics;
      Push(&cells, m.rms_e1);
      Push(&cells, m.steady_state_e1);
      Push(&cells, m.max_torque);
      cells.push_back(m.settling_time ? FormatDouble(*m.settling_time)
                                      : "not_settled");
      cells.push_back(FormatDouble(m.band));
      cells.push_back(FormatDouble(m.energy_u));
      cells.push_back(FormatDouble(s.torque_limit));
      cells.push_back(s.torque_limit > 0.0
                          ? (m.max_torque.maxCoeff() > s.torque_limit ? "true"
                                                                       : "false")
                          : "unchecked");
    } else {
      for (int i = 0; i < 3 * n + 3; ++i) cells.push_back(nan);
      cells.push_back(FormatDouble(s.torque_limit));
      cells.push_back("unchecked");
    }
    if (s.diagnostic) {
      cells.push_back(s.diagnostic->integral ? "e0" : "e1");
      Push(&cells, s.diagnostic->predicted);
      Push(&cells, s.diagnostic->observed);
    } else {
      cells.push_back("none");
      for (int i = 0; i < 2 * n; ++i) cells.push_back(nan);
    }
    Row(out, cells);
  }
  return out.str();
}

std::string RunPlotScript(const std::string& header, const std::string& name,
                          const std::string& csv_file, int dof,
                          bool has_observer) {
  std::ostringstream out;
  out << header;
  out << "set datafile separator ','\n"
      << "set datafile commentschars '#'\n"
      << "set terminal pngcairo size 1200," << (has_observer ? 1200 : 900)
      << "\n"
      << "set output " << Quote(name + "_plot.png") << "\n"
      << "set grid\nset xlabel 't [s]'\n"
      << "set multiplot layout " << (has_observer ? 4 : 3) << ",1\n";
  const std::string f = Quote(csv_file);
  auto plot = [&](const std::string& title, const std::string& ylabel,
                  const std::vector<std::pair<std::string, std::string>>& series) {
    out << "set title " << Quote(title) << "\nset ylabel " << Quote(ylabel)
        << "\nplot ";
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (i > 0) out << ", \\\n     ";
      out << (i == 0 ? f : "''") << " using 1:(column('" << series[i].first
          << "')) with lines title " << Quote(series[i].second);
    }
    out << "\n";
  };
  std::vector<std::pair<std::string, std::string>> pos, err, tau, est;
  for (int i = 1; i <= dof; ++i) {
    const std::string k = std::to_string(i);
    pos.push_back({"q" + k, "q" + k});
    pos.push_back({"qref" + k, "qref" + k});
    err.push_back({"e1_" + k, "e" + k});
    tau.push_back({"u" + k, "u" + k});
    est.push_back({"qdhat_" + k, "qdhat" + k});
    est.push_back({"qd" + k, "qd" + k});
  }
  plot("Joint positions", "rad", pos);
  plot("Tracking errors", "rad", err);
  plot("Joint torques", "N m", tau);
  if (has_observer) plot("Velocity estimates", "rad/s", est);
  out << "unset multiplot\n";
  return out.str();
}

std::string ComparePlotScript(const std::string& header,
                              const std::string& name,
                              const std::vector<std::string>& labels,
                              const std::vector<std::string>& csv_files,
                              int dof) {
  std::ostringstream out;
  out << header;
  out << "set datafile separator ','\n"
      << "set datafile commentschars '#'\n"
      << "set terminal pngcairo size 1200," << 300 * 2 * dof << "\n"
      << "set output " << Quote(name + "_plot.png") << "\n"
      << "set grid\nset xlabel 't [s]'\n"
      << "set multiplot layout " << 2 * dof << ",1\n";
  for (const char* kind : {"e1_", "u"}) {
    for (int j = 1; j <= dof; ++j) {
      const std::string col = std::string(kind) + std::to_string(j);
      const bool err = std::string(kind) == "e1_";
      out << "set title " << Quote((err ? "Tracking error, joint "
                                         : "Torque, joint ") +
                                   std::to_string(j))
          << "\nset ylabel " << Quote(err ? "rad" : "N m") << "\nplot ";
      for (std::size_t i = 0; i < csv_files.size(); ++i) {
        if (i > 0) out << ", \\\n     ";
        out << Quote(csv_files[i]) << " using 1:(column('" << col
            << "')) with lines title " << Quote(labels[i]);
      }
      out << "\n";
    }
  }
  out << "unset multiplot\n";
  return out.str();
}

std::string AnalysisCsv(const std::string& header,
                        const std::vector<AnalysisRow>& rows, int dof) {
  std::vector<std::string> cols = {
      "matrix_kind",     "h",         "q_w",   "r_w", "max_re_eig", "hurwitz",
      "threshold_proof", "gamma_est", "margin"};
  Append(&cols, "q", dof);
  cols.insert(cols.end(), {"threshold_stmt", "lambda_max_eps", "min_eig_b"});
  std::ostringstream out;
  out << header;
  Row(out, cols);
  for (const AnalysisRow& r : rows) {
    std::vector<std::string> cells = {
        std::string(ToString(r.kind)), FormatDouble(r.h),
        FormatDouble(r.q_w),           FormatDouble(r.r_w),
        FormatDouble(r.max_re_eig),    r.hurwitz ? "true" : "false",
        FormatDouble(r.threshold),     FormatDouble(r.gamma_est),
        FormatDouble(r.margin)};
    Push(&cells, r.q);
    cells.push_back(FormatDouble(r.threshold_stmt));
    cells.push_back(FormatDouble(r.lambda_max_eps));
    cells.push_back(FormatDouble(r.min_eig_b));
    Row(out, cells);
  }
  return out.str();
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("error writing '" + path + "'");
}

}  // namespace nrhc
