// Copyright 2026 The Authors.
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

// YAML scenario files. The schema is strict: unknown keys are rejected, and
// every omitted optional field takes its default and is written back by
// EmitConfig.

#ifndef PSEUDOSYNC_CONFIG_H_
#define PSEUDOSYNC_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "pseudosync/sim.h"

namespace pseudosync {

enum class ExperimentKind : uint8_t { kNone, kFig5a, kFig5b };

std::string_view ExperimentKindName(ExperimentKind kind);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kNone;
  int seeds = 30;
  uint64_t first_seed = 1;
  std::vector<double> betas = {0.5, 1.0, 1.5, 2.0, 2.5};
  std::vector<std::vector<double>> groups;

  bool operator==(const ExperimentSpec&) const = default;
};

struct RunConfig {
  ScenarioConfig scenario;
  ExperimentSpec experiment;

  bool operator==(const RunConfig&) const = default;
};

// Errors are InvalidArgument. YAML syntax errors carry "line L, column C";
// schema and validation errors carry the field path.
absl::StatusOr<RunConfig> ParseConfig(std::string_view text,
                                      std::string_view source = "<config>");

absl::StatusOr<RunConfig> LoadConfigFile(const std::string& path);

// Full echo including defaults; ParseConfig(EmitConfig(c)) == c.
std::string EmitConfig(const RunConfig& config);

std::vector<std::string> PresetNames();
absl::StatusOr<std::string> PresetText(std::string_view name);
absl::StatusOr<RunConfig> LoadPreset(std::string_view name);

// A preset name when one matches, otherwise a file path.
absl::StatusOr<RunConfig> LoadConfig(const std::string& name_or_path);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_CONFIG_H_
