//
// Copyright 2026 The migate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <exception>
#include <string>

#include "json.hpp"
#include "migate/cli/config.hpp"

namespace migate::cli {

// Each command writes its artifacts below cfg.output_dir and returns a short
// JSON summary for stdout.
nlohmann::ordered_json cmd_synth(const RunConfig& cfg);
nlohmann::ordered_json cmd_estimate(const RunConfig& cfg);
nlohmann::ordered_json cmd_gate(const RunConfig& cfg);
nlohmann::ordered_json cmd_corrupt(const RunConfig& cfg);
nlohmann::ordered_json cmd_score(const RunConfig& cfg);
nlohmann::ordered_json cmd_report(const RunConfig& cfg);

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitProvider = 4,
  kExitAsset = 5,
  kExitSchema = 6,
};

int exit_code(const std::exception& e);
// Single-line {"error", "kind", "exit_code"} object.
std::string error_json(const std::exception& e);

}  // namespace migate::cli
