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

#ifndef NRHC_CLI_H_
#define NRHC_CLI_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nrhc/scenario.h"

namespace nrhc {

// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitDivergence = 2,
  kExitIo = 3,
};

struct CliOptions {
  std::string out_dir = ".";
  // Seeds randomized state sampling in `analyze`; simulations ignore it.
  std::uint64_t seed = 0;
};

// Runs one scenario and writes <name>_trajectory.csv, <name>_metrics.csv
// and <name>_plot.gp. Throws on failure.
void CmdRun(const std::string& config_path, const CliOptions& opt,
            std::ostream& out);

// Runs several scenarios in parallel and writes per-scenario trajectories
// plus compare_metrics.csv and compare_plot.gp. Throws DivergenceError after
// writing the table if any run diverged.
void CmdCompare(const std::vector<std::string>& config_paths,
                const CliOptions& opt, std::ostream& out);

// Stability report at frozen states. An empty `states` list uses the grid
// {-pi/2, 0, pi/2, pi}^2 unless `random_states` > 0, which draws that many
// states uniformly from [-pi, pi)^2 using opt.seed.
void CmdAnalyze(const std::string& config_path,
                const std::vector<Eigen::VectorXd>& states, int random_states,
                const CliOptions& opt, std::ostream& out);

// Runs the scenario once per value of `param` (a dotted key path). Empty
// `param` falls back to the sweep section of the config. Divergent runs are
// recorded, not fatal.
void CmdSweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const CliOptions& opt,
              std::ostream& out);

// Invokes `command`, reporting any exception on `err`, and returns the
// matching exit status.
int RunGuarded(const std::function<void()>& command, std::ostream& err);

// Parses "a,b,c" into numbers; throws ValidationError on bad input.
std::vector<double> ParseNumberList(const std::string& text);

}  // namespace nrhc

#endif  // NRHC_CLI_H_
