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

// Command-line driver: run, compare, analyze and sweep scenario files.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nrhc/cli.h"
#include "nrhc/errors.h"

int main(int argc, char** argv) {
  CLI::App app{"Receding-horizon manipulator control simulator"};
  app.require_subcommand(1);
  nrhc::CliOptions opt;
  app.add_option("--out-dir", opt.out_dir, "Directory for output files")
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "Seed for randomized state sampling")
      ->capture_default_str();

  std::string run_file;
  auto* run = app.add_subcommand("run", "Simulate one scenario");
  run->add_option("file", run_file, "Scenario file")->required();

  std::vector<std::string> compare_files;
  auto* compare = app.add_subcommand("compare", "Simulate and tabulate scenarios");
  compare->add_option("files", compare_files, "Two or more scenario files")
      ->required();

  std::string analyze_file;
  std::vector<std::string> state_args;
  int random_states = 0;
  auto* analyze = app.add_subcommand("analyze", "Frozen-state stability report");
  analyze->add_option("file", analyze_file, "Scenario file")->required();
  analyze->add_option("--state", state_args, "Joint angles q1,q2 (repeatable)");
  analyze->add_option("--random-states", random_states,
                      "Number of random states when no --state is given");

  std::string sweep_file, sweep_param, sweep_values;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over a value list");
  sweep->add_option("file", sweep_file, "Scenario file")->required();
  sweep->add_option("--param", sweep_param, "Dotted key path, e.g. controller.h");
  sweep->add_option("--values", sweep_values, "Comma-separated values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? nrhc::kExitOk : nrhc::kExitValidation;
  }

  return nrhc::RunGuarded(
      [&] {
        if (*run) {
          nrhc::CmdRun(run_file, opt, std::cout);
        } else if (*compare) {
          nrhc::CmdCompare(compare_files, opt, std::cout);
        } else if (*analyze) {
          std::vector<Eigen::VectorXd> states;
          for (const std::string& s : state_args) {
            const std::vector<double> v = nrhc::ParseNumberList(s);
            states.push_back(Eigen::Map<const Eigen::VectorXd>(
                v.data(), static_cast<Eigen::Index>(v.size())));
          }
          nrhc::CmdAnalyze(analyze_file, states, random_states, opt,
                           std::cout);
        } else if (*sweep) {
          if (sweep_param.empty() != sweep_values.empty()) {
            throw nrhc::ValidationError(
                "sweep: --param and --values go together");
          }
          const std::vector<double> values =
              sweep_values.empty() ? std::vector<double>{}
                                   : nrhc::ParseNumberList(sweep_values);
          nrhc::CmdSweep(sweep_file, sweep_param, values, opt, std::cout);
        }
      },
      std::cerr);
}
