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

#ifndef NRHC_SCENARIO_H_
#define NRHC_SCENARIO_H_

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nrhc/dynamics.h"
#include "nrhc/sim.h"

namespace nrhc {

struct SweepSpec {
  std::string param;  // dotted key path, e.g. "controller.h"
  std::vector<double> values;
};

// A scenario file resolved into simulation inputs. The file is a YAML
// mapping; see scenarios/*.scenario and README.md for the schema.
struct ScenarioConfig {
  std::string name = "scenario";
  SimConfig sim;
  // Plant link constants before the payload is folded in; sim.plant holds
  // the result.
  RobotParams plant_base = RobotParams::TwoLinkTable();
  std::optional<PayloadPerturbation> payload;
  double settling_band = 1e-3;  // rad
  double torque_limit = 0.0;    // N m; 0 disables the check
  std::optional<SweepSpec> sweep;

  // Dotted paths of the keys given explicitly in the source.
  std::set<std::string> explicit_keys;
  std::string source;
  // Soft findings from validation (e.g. dt > h/10).
  std::vector<std::string> warnings;
};

using Override = std::pair<std::string, std::string>;  // path, YAML value

// Parses and validates a scenario. Syntax errors carry line and column;
// validation errors name the offending key path. `overrides` replace leaf
// values by dotted path before validation.
ScenarioConfig ParseConfigText(const std::string& text,
                               const std::string& source = "<string>",
                               const std::vector<Override>& overrides = {});

// Reads `path` (IoError if unreadable) and parses it.
ScenarioConfig ParseConfigFile(const std::string& path,
                               const std::vector<Override>& overrides = {});

// Fully resolved YAML; keys not given in the source end in "# default".
std::string EmitConfig(const ScenarioConfig& cfg);

// Comment block that opens every output file: `title`, any `notes`, then
// the resolved config between marker lines, all prefixed with "# ".
std::string HeaderBlock(const ScenarioConfig& cfg, const std::string& title,
                        const std::vector<std::string>& notes = {});

// Recovers the config text embedded by HeaderBlock. Throws ValidationError
// if no config block is present.
std::string ExtractHeaderConfig(const std::string& file_text);

}  // namespace nrhc

#endif  // NRHC_SCENARIO_H_
