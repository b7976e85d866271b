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

#ifndef NRHC_REPORT_H_
#define NRHC_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "nrhc/analysis.h"
#include "nrhc/sim.h"
#include "nrhc/trajectory_log.h"

namespace nrhc {

// Column names of the trajectory CSV, in order.
std::vector<std::string> TrajectoryColumns(const TrajectoryLog& log);

// Header block followed by the column row and one row per logged sample.
std::string TrajectoryCsv(const std::string& header, const TrajectoryLog& log);

// Outcome of one scenario run, successful or not.
struct RunSummary {
  std::string name;
  int dof = 2;
  std::optional<Metrics> metrics;      // empty when the run diverged
  std::optional<double> divergence_time;
  double torque_limit = 0.0;           // 0 disables the check
  std::optional<SteadyStateDiagnostic> diagnostic;
};

std::string MetricsCsv(const std::string& header,
                       const std::vector<RunSummary>& runs);

// Gnuplot script drawing positions against references, tracking errors and
// torques from `csv_file`.
std::string RunPlotScript(const std::string& header, const std::string& name,
                          const std::string& csv_file, int dof,
                          bool has_observer);

// Overlays tracking errors and torques of several trajectory files.
std::string ComparePlotScript(const std::string& header,
                              const std::string& name,
                              const std::vector<std::string>& labels,
                              const std::vector<std::string>& csv_files,
                              int dof);

// One row of the stability report.
struct AnalysisRow {
  MatrixKind kind = MatrixKind::kABasic;
  double h = 0.0, q_w = 0.0, r_w = 0.0;
  Eigen::VectorXd q;
  double max_re_eig = 0.0;
  bool hurwitz = false;
  double threshold = 0.0;  // proof-consistent reading
  double threshold_stmt = 0.0;
  double gamma_est = 0.0;
  double margin = 0.0;
  double lambda_max_eps = 0.0;
  double min_eig_b = 0.0;
};

std::string AnalysisCsv(const std::string& header,
                        const std::vector<AnalysisRow>& rows, int dof);

// Writes `content` to `path`, throwing IoError on failure.
void WriteTextFile(const std::string& path, const std::string& content);

}  // namespace nrhc

#endif  // NRHC_REPORT_H_
