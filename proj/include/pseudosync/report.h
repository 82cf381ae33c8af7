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

// Report serialization: JSON lines (lossless), CSV series for plotting and
// plain-text tables, plus the run manifest that pins report bytes by hash.

#ifndef PSEUDOSYNC_REPORT_H_
#define PSEUDOSYNC_REPORT_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "pseudosync/experiments.h"
#include "pseudosync/sim.h"

namespace pseudosync {

enum class ReportFormat : uint8_t { kTable, kCsv, kJsonLines };

std::string_view ReportFormatName(ReportFormat format);
absl::StatusOr<ReportFormat> ParseReportFormat(std::string_view text);
// File extension including the dot.
std::string_view ReportExtension(ReportFormat format);

// JSON lines. Each line is an object tagged by "record"; parsing the output
// yields a value equal to the input.
std::string ToJsonLines(const SimReport& report);
std::string ToJsonLines(const Fig5aResult& result);
std::string ToJsonLines(const Fig5bResult& result);
absl::StatusOr<SimReport> SimReportFromJsonLines(std::string_view text);
absl::StatusOr<Fig5aResult> Fig5aFromJsonLines(std::string_view text);
absl::StatusOr<Fig5bResult> Fig5bFromJsonLines(std::string_view text);

// CSV with a header row, numbers at 9 significant digits, trailing newline.
// vmu_index,frequency,p,avg_entropy,allocation,demand,served,shortage,
// leftover,realized_utility,expected_utility,seed
std::string VmuCsv(const SimReport& report);
// vmu_index,time,entropy
std::string TimelineCsv(const SimReport& report);
// vmu_index,frequency,scheme,utility,seed (realized utility)
std::string Fig5aCsv(const Fig5aResult& result);
// group,beta,global_utility,seed (sum of realized utilities)
std::string Fig5bCsv(const Fig5bResult& result);

std::string ToTable(const SimReport& report);
std::string ToTable(const Fig5aResult& result);
std::string ToTable(const Fig5bResult& result);

// Rendering in the requested format.
std::string Render(const SimReport& report, ReportFormat format);
std::string Render(const Fig5aResult& result, ReportFormat format);
std::string Render(const Fig5bResult& result, ReportFormat format);

struct ManifestOutput {
  std::string path;
  std::string sha256;  // hex digest of the bytes written to path

  bool operator==(const ManifestOutput&) const = default;
};

struct RunManifest {
  std::string tool_version;
  std::string command;
  std::string config;  // YAML echo with defaults filled
  std::vector<uint64_t> seeds;
  std::string seed_source;  // "config", "flag" or "env:PSEUDOSYNC_SEED"
  std::string report_path;
  std::string report_sha256;
  std::vector<ManifestOutput> outputs;

  bool operator==(const RunManifest&) const = default;
};

std::string_view ToolVersion();
std::string Sha256Hex(std::string_view bytes);
std::string ToJson(const RunManifest& manifest);
absl::StatusOr<RunManifest> ManifestFromJson(std::string_view text);
// OK when report_sha256 is the digest of report_bytes.
absl::Status VerifyManifest(const RunManifest& manifest,
                            std::string_view report_bytes);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_REPORT_H_
