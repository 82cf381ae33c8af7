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

#include "pseudosync/report.h"

#include <cmath>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "pseudosync/config.h"
#include "pseudosync/ledger.h"

#ifndef PSEUDOSYNC_VERSION
#define PSEUDOSYNC_VERSION "0.0.0"
#endif

namespace pseudosync {

using Json = nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EntropyPoint, time, entropy)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(VmuResult, index, frequency, p, avg_entropy,
                                   allocation, demand, served, shortage,
                                   leftover, realized_utility,
                                   expected_utility, change_epochs,
                                   group_sizes, timeline)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AttackerResult, name, tracked_fraction,
                                   mean_tracked_fraction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SecurityCounters, v2t_attempts,
                                   v2t_accepted, t2t_attempts, t2t_accepted,
                                   reports_filed, reports_rejected,
                                   blacklisted)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LedgerEntry, index, epoch, block_hash)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SchemeOutcome, allocation, demand, realized,
                                   expected, mean_realized, mean_expected)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Summary, min, median, mean, max)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Fig5aSeed, seed, p, on_demand, equal,
                                   improvement_percent,
                                   expected_improvement_percent,
                                   mean_improved, every_vmu_dominates)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Fig5bCell, group, beta, seed,
                                   global_utility, mean_utility,
                                   global_expected_utility)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ManifestOutput, path, sha256)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunManifest, tool_version, command, config,
                                   seeds, seed_source, report_path,
                                   report_sha256, outputs)

void to_json(Json& j, const CaLogRecord& r) {
  j = Json{{"seq", r.seq},         {"timestamp", r.timestamp},
           {"entity", r.entity},   {"rsu", r.rsu},
           {"type", std::string(CaRecordTypeName(r.type))},
           {"count", r.count}};
}

void from_json(const Json& j, CaLogRecord& r) {
  j.at("seq").get_to(r.seq);
  j.at("timestamp").get_to(r.timestamp);
  j.at("entity").get_to(r.entity);
  j.at("rsu").get_to(r.rsu);
  j.at("count").get_to(r.count);
  const std::string type = j.at("type").get<std::string>();
  for (CaRecordType t :
       {CaRecordType::kSetRequest, CaRecordType::kChangeRequest,
        CaRecordType::kChange, CaRecordType::kRestock,
        CaRecordType::kRevocation, CaRecordType::kReturn}) {
    if (CaRecordTypeName(t) == type) {
      r.type = t;
      return;
    }
  }
  throw std::invalid_argument("unknown CA record type " + type);
}

namespace {

constexpr char kCsvNumber[] = "%.9g";

std::string Csv(double v) { return absl::StrFormat(kCsvNumber, v); }

std::string ConfigYaml(const ScenarioConfig& config) {
  return EmitConfig(RunConfig{config, ExperimentSpec{}});
}

ScenarioConfig ConfigFromYaml(const std::string& yaml) {
  absl::StatusOr<RunConfig> parsed = ParseConfig(yaml, "report config");
  if (!parsed.ok()) {
    throw std::invalid_argument(std::string(parsed.status().message()));
  }
  return parsed->scenario;
}

std::string Line(const Json& j) { return j.dump() + "\n"; }

// Parses every non-empty line; record types are checked by the callers.
std::vector<Json> ParseLines(std::string_view text) {
  std::vector<Json> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    lines.push_back(Json::parse(line));
  }
  return lines;
}

template <typename F>
auto Decode(std::string_view text, std::string_view what, F body)
    -> absl::StatusOr<decltype(body(std::declval<std::vector<Json>&>()))> {
  try {
    std::vector<Json> lines = ParseLines(text);
    if (lines.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat(std::string(what), ": no records"));
    }
    return body(lines);
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(what), ": ", e.what()));
  }
}

std::string Record(const Json& j) { return j.at("record").get<std::string>(); }

void Expect(const Json& j, std::string_view type) {
  if (Record(j) != type) {
    throw std::invalid_argument(
        absl::StrCat("expected record ", std::string(type), ", got ",
                     Record(j)));
  }
}

std::string Pad(const std::string& text, size_t width) {
  return text.size() >= width ? text : std::string(width - text.size(), ' ') + text;
}

}  // namespace

std::string_view ReportFormatName(ReportFormat format) {
  switch (format) {
    case ReportFormat::kTable:
      return "table";
    case ReportFormat::kCsv:
      return "csv";
    case ReportFormat::kJsonLines:
      return "jsonl";
  }
  return "table";
}

absl::StatusOr<ReportFormat> ParseReportFormat(std::string_view text) {
  if (text == "table") return ReportFormat::kTable;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "jsonl" || text == "json-lines") return ReportFormat::kJsonLines;
  return absl::InvalidArgumentError(absl::StrCat(
      "format must be table, csv or jsonl, got '", std::string(text), "'"));
}

std::string_view ReportExtension(ReportFormat format) {
  switch (format) {
    case ReportFormat::kTable:
      return ".txt";
    case ReportFormat::kCsv:
      return ".csv";
    case ReportFormat::kJsonLines:
      return ".jsonl";
  }
  return ".txt";
}

std::string ToJsonLines(const SimReport& report) {
  std::string out = Line(Json{
      {"record", "sim_report"},
      {"config", ConfigYaml(report.config)},
      {"rng_algorithm", report.rng_algorithm},
      {"hash_function", report.hash_function},
      {"budget", report.budget},
      {"allocated_total", report.allocated_total},
      {"total_realized_utility", report.total_realized_utility},
      {"mean_realized_utility", report.mean_realized_utility},
      {"total_expected_utility", report.total_expected_utility},
      {"mean_expected_utility", report.mean_expected_utility},
      {"security", report.security},
      {"ledger_head", report.ledger_head},
      {"events_processed", report.events_processed},
      {"invariant_checks", report.invariant_checks},
      {"invariant_violations", report.invariant_violations}});
  for (const VmuResult& vmu : report.vmus) {
    Json j = vmu;
    j["record"] = "vmu";
    out += Line(j);
  }
  for (const AttackerResult& attacker : report.attackers) {
    Json j = attacker;
    j["record"] = "attacker";
    out += Line(j);
  }
  for (const LedgerEntry& entry : report.ledger) {
    Json j = entry;
    j["record"] = "ledger";
    out += Line(j);
  }
  for (const CaLogRecord& record : report.ca_log) {
    Json j = record;
    j["record"] = "ca_log";
    out += Line(j);
  }
  return out;
}

absl::StatusOr<SimReport> SimReportFromJsonLines(std::string_view text) {
  return Decode(text, "sim report", [](std::vector<Json>& lines) {
    const Json& head = lines.front();
    Expect(head, "sim_report");
    SimReport report;
    report.config = ConfigFromYaml(head.at("config").get<std::string>());
    head.at("rng_algorithm").get_to(report.rng_algorithm);
    head.at("hash_function").get_to(report.hash_function);
    head.at("budget").get_to(report.budget);
    head.at("allocated_total").get_to(report.allocated_total);
    head.at("total_realized_utility").get_to(report.total_realized_utility);
    head.at("mean_realized_utility").get_to(report.mean_realized_utility);
    head.at("total_expected_utility").get_to(report.total_expected_utility);
    head.at("mean_expected_utility").get_to(report.mean_expected_utility);
    head.at("security").get_to(report.security);
    head.at("ledger_head").get_to(report.ledger_head);
    head.at("events_processed").get_to(report.events_processed);
    head.at("invariant_checks").get_to(report.invariant_checks);
    head.at("invariant_violations").get_to(report.invariant_violations);
    for (size_t k = 1; k < lines.size(); ++k) {
      const Json& j = lines[k];
      const std::string type = Record(j);
      if (type == "vmu") {
        report.vmus.push_back(j.get<VmuResult>());
      } else if (type == "attacker") {
        report.attackers.push_back(j.get<AttackerResult>());
      } else if (type == "ledger") {
        report.ledger.push_back(j.get<LedgerEntry>());
      } else if (type == "ca_log") {
        report.ca_log.push_back(j.get<CaLogRecord>());
      } else {
        throw std::invalid_argument("unexpected record " + type);
      }
    }
    return report;
  });
}

std::string ToJsonLines(const Fig5aResult& result) {
  std::string out = Line(Json{
      {"record", "fig5a"},
      {"config", ConfigYaml(result.base)},
      {"evaluation", "realized"},
      {"frequencies", result.frequencies},
      {"mean_on_demand", result.mean_on_demand},
      {"mean_equal", result.mean_equal},
      {"mean_on_demand_expected", result.mean_on_demand_expected},
      {"mean_equal_expected", result.mean_equal_expected},
      {"improvement_percent", result.improvement_percent},
      {"expected_improvement_percent", result.expected_improvement_percent},
      {"reference_improvement_percent", kReferenceImprovementPercent},
      {"improvement_distribution", result.improvement_distribution},
      {"seeds_mean_improved", result.seeds_mean_improved},
      {"seeds_every_vmu_dominates", result.seeds_every_vmu_dominates},
      {"expected_seeds_every_vmu_dominates",
       result.expected_seeds_every_vmu_dominates}});
  for (const Fig5aSeed& seed : result.seeds) {
    Json j = seed;
    j["record"] = "fig5a_seed";
    out += Line(j);
  }
  return out;
}

absl::StatusOr<Fig5aResult> Fig5aFromJsonLines(std::string_view text) {
  return Decode(text, "fig5a report", [](std::vector<Json>& lines) {
    const Json& head = lines.front();
    Expect(head, "fig5a");
    Fig5aResult result;
    result.base = ConfigFromYaml(head.at("config").get<std::string>());
    head.at("frequencies").get_to(result.frequencies);
    head.at("mean_on_demand").get_to(result.mean_on_demand);
    head.at("mean_equal").get_to(result.mean_equal);
    head.at("mean_on_demand_expected").get_to(result.mean_on_demand_expected);
    head.at("mean_equal_expected").get_to(result.mean_equal_expected);
    head.at("improvement_percent").get_to(result.improvement_percent);
    head.at("expected_improvement_percent")
        .get_to(result.expected_improvement_percent);
    head.at("improvement_distribution")
        .get_to(result.improvement_distribution);
    head.at("seeds_mean_improved").get_to(result.seeds_mean_improved);
    head.at("seeds_every_vmu_dominates")
        .get_to(result.seeds_every_vmu_dominates);
    head.at("expected_seeds_every_vmu_dominates")
        .get_to(result.expected_seeds_every_vmu_dominates);
    for (size_t k = 1; k < lines.size(); ++k) {
      Expect(lines[k], "fig5a_seed");
      result.seeds.push_back(lines[k].get<Fig5aSeed>());
    }
    return result;
  });
}

std::string ToJsonLines(const Fig5bResult& result) {
  std::string out = Line(Json{
      {"record", "fig5b"},
      {"config", ConfigYaml(result.base)},
      {"evaluation", "realized"},
      {"aggregation", "sum"},
      {"groups", result.groups},
      {"betas", result.betas},
      {"seeds", result.seeds},
      {"mean_global_utility", result.mean_global_utility},
      {"mean_global_expected_utility", result.mean_global_expected_utility},
      {"cells_total", result.cells_total},
      {"cells_passing", result.cells_passing}});
  for (const Fig5bCell& cell : result.cells) {
    Json j = cell;
    j["record"] = "fig5b_cell";
    out += Line(j);
  }
  return out;
}

absl::StatusOr<Fig5bResult> Fig5bFromJsonLines(std::string_view text) {
  return Decode(text, "fig5b report", [](std::vector<Json>& lines) {
    const Json& head = lines.front();
    Expect(head, "fig5b");
    Fig5bResult result;
    result.base = ConfigFromYaml(head.at("config").get<std::string>());
    head.at("groups").get_to(result.groups);
    head.at("betas").get_to(result.betas);
    head.at("seeds").get_to(result.seeds);
    head.at("mean_global_utility").get_to(result.mean_global_utility);
    head.at("mean_global_expected_utility")
        .get_to(result.mean_global_expected_utility);
    head.at("cells_total").get_to(result.cells_total);
    head.at("cells_passing").get_to(result.cells_passing);
    for (size_t k = 1; k < lines.size(); ++k) {
      Expect(lines[k], "fig5b_cell");
      result.cells.push_back(lines[k].get<Fig5bCell>());
    }
    return result;
  });
}

std::string VmuCsv(const SimReport& report) {
  std::string out =
      "vmu_index,frequency,p,avg_entropy,allocation,demand,served,shortage,"
      "leftover,realized_utility,expected_utility,seed\n";
  for (const VmuResult& v : report.vmus) {
    absl::StrAppend(&out, v.index, ",", Csv(v.frequency), ",", Csv(v.p), ",",
                    Csv(v.avg_entropy), ",", v.allocation, ",", v.demand, ",",
                    v.served, ",", v.shortage, ",", v.leftover, ",",
                    Csv(v.realized_utility), ",", Csv(v.expected_utility), ",",
                    report.config.seed, "\n");
  }
  return out;
}

std::string TimelineCsv(const SimReport& report) {
  std::string out = "vmu_index,time,entropy\n";
  for (const VmuResult& v : report.vmus) {
    for (const EntropyPoint& point : v.timeline) {
      absl::StrAppend(&out, v.index, ",", Csv(point.time), ",",
                      Csv(point.entropy), "\n");
    }
  }
  return out;
}

std::string Fig5aCsv(const Fig5aResult& result) {
  std::string out = "vmu_index,frequency,scheme,utility,seed\n";
  for (const Fig5aSeed& seed : result.seeds) {
    for (const auto& [scheme, outcome] :
         {std::pair<const char*, const SchemeOutcome*>{"on_demand",
                                                       &seed.on_demand},
          std::pair<const char*, const SchemeOutcome*>{"equal", &seed.equal}}) {
      for (size_t i = 0; i < outcome->realized.size(); ++i) {
        absl::StrAppend(&out, i, ",", Csv(result.frequencies[i]), ",", scheme,
                        ",", Csv(outcome->realized[i]), ",", seed.seed, "\n");
      }
    }
  }
  return out;
}

std::string Fig5bCsv(const Fig5bResult& result) {
  std::string out = "group,beta,global_utility,seed\n";
  for (const Fig5bCell& cell : result.cells) {
    absl::StrAppend(&out, cell.group, ",", Csv(cell.beta), ",",
                    Csv(cell.global_utility), ",", cell.seed, "\n");
  }
  return out;
}

std::string ToTable(const SimReport& report) {
  std::string out = absl::StrFormat(
      "scenario: %d VMUs, mode %s, scheme %s, seed %d\n"
      "budget %d, allocated %d\n\n",
      report.vmus.size(), std::string(SyncModeName(report.config.mode)),
      std::string(AllocationSchemeName(report.config.scheme)),
      report.config.seed, report.budget, report.allocated_total);
  out += " vmu  frequency      p  alloc  demand  served  shortage  "
         "realized  expected\n";
  for (const VmuResult& v : report.vmus) {
    out += absl::StrFormat("%4d  %9.2f  %5.3f  %5d  %6d  %6d  %8d  %8.2f  "
                           "%8.2f\n",
                           v.index, v.frequency, v.p, v.allocation, v.demand,
                           v.served, v.shortage, v.realized_utility,
                           v.expected_utility);
  }
  out += absl::StrFormat("mean utility: realized %.2f, expected %.2f\n\n",
                         report.mean_realized_utility,
                         report.mean_expected_utility);
  out += "attacker    mean tracked fraction\n";
  for (const AttackerResult& a : report.attackers) {
    out += absl::StrFormat("%-10s  %.4f\n", a.name, a.mean_tracked_fraction);
  }
  const SecurityCounters& s = report.security;
  out += absl::StrFormat(
      "\nforged V2T accepted %d/%d, revoked T2T accepted %d/%d, "
      "reports %d filed %d rejected, blacklisted %d\n",
      s.v2t_accepted, s.v2t_attempts, s.t2t_accepted, s.t2t_attempts,
      s.reports_filed, s.reports_rejected, s.blacklisted);
  out += absl::StrFormat("ledger: %d blocks, head %s\n", report.ledger.size(),
                         report.ledger_head);
  out += absl::StrFormat("events %d, invariant checks %d, violations %d\n",
                         report.events_processed, report.invariant_checks,
                         report.invariant_violations.size());
  for (const std::string& v : report.invariant_violations) {
    out += "  violation: " + v + "\n";
  }
  return out;
}

std::string ToTable(const Fig5aResult& result) {
  const int n = static_cast<int>(result.seeds.size());
  std::string out = absl::StrFormat(
      "on-demand vs equal allocation over %d seeds (mean utility per VMU)\n\n"
      " vmu  frequency  on_demand     equal  | expected: on_demand     "
      "equal\n",
      n);
  for (size_t i = 0; i < result.frequencies.size(); ++i) {
    out += absl::StrFormat("%4d  %9.2f  %9.2f  %8.2f  |            %9.2f  "
                           "%8.2f\n",
                           i, result.frequencies[i], result.mean_on_demand[i],
                           result.mean_equal[i],
                           result.mean_on_demand_expected[i],
                           result.mean_equal_expected[i]);
  }
  out += absl::StrFormat(
      "\nachieved improvement: %.1f%%  (reference improvement: %.1f%%)\n",
      result.improvement_percent, kReferenceImprovementPercent);
  out += absl::StrFormat("expected-utility improvement: %.1f%%\n",
                         result.expected_improvement_percent);
  out += absl::StrFormat(
      "per-seed improvement: min %.1f%%, median %.1f%%, max %.1f%%\n",
      result.improvement_distribution.min,
      result.improvement_distribution.median,
      result.improvement_distribution.max);
  out += absl::StrFormat("seeds with higher mean utility: %d/%d\n",
                         result.seeds_mean_improved, n);
  out += absl::StrFormat(
      "seeds where every VMU gains: %d/%d realized, %d/%d expected\n",
      result.seeds_every_vmu_dominates, n,
      result.expected_seeds_every_vmu_dominates, n);
  return out;
}

std::string ToTable(const Fig5bResult& result) {
  std::string out = absl::StrFormat(
      "global utility per group (sum over members, mean over %d seeds)\n\n"
      "%8s",
      result.seeds.size(), "beta");
  for (size_t g = 0; g < result.groups.size(); ++g) {
    out += Pad(absl::StrFormat("group %d", g + 1), 12);
  }
  out += "\n";
  for (size_t b = 0; b < result.betas.size(); ++b) {
    out += absl::StrFormat("%8.2f", result.betas[b]);
    for (size_t g = 0; g < result.groups.size(); ++g) {
      out += Pad(absl::StrFormat("%.2f", result.mean_global_utility[g][b]), 12);
    }
    out += "\n";
  }
  out += absl::StrFormat(
      "\n(beta, seed) cells ordered and non-decreasing in beta: %d/%d\n",
      result.cells_passing, result.cells_total);
  return out;
}

std::string Render(const SimReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kTable:
      return ToTable(report);
    case ReportFormat::kCsv:
      return VmuCsv(report);
    case ReportFormat::kJsonLines:
      return ToJsonLines(report);
  }
  return ToTable(report);
}

std::string Render(const Fig5aResult& result, ReportFormat format) {
  switch (format) {
    case ReportFormat::kTable:
      return ToTable(result);
    case ReportFormat::kCsv:
      return Fig5aCsv(result);
    case ReportFormat::kJsonLines:
      return ToJsonLines(result);
  }
  return ToTable(result);
}

std::string Render(const Fig5bResult& result, ReportFormat format) {
  switch (format) {
    case ReportFormat::kTable:
      return ToTable(result);
    case ReportFormat::kCsv:
      return Fig5bCsv(result);
    case ReportFormat::kJsonLines:
      return ToJsonLines(result);
  }
  return ToTable(result);
}

std::string_view ToolVersion() { return PSEUDOSYNC_VERSION; }

std::string Sha256Hex(std::string_view bytes) {
  return DigestHex(Sha256(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size())));
}

std::string ToJson(const RunManifest& manifest) {
  return Json(manifest).dump(2) + "\n";
}

absl::StatusOr<RunManifest> ManifestFromJson(std::string_view text) {
  try {
    return Json::parse(text).get<RunManifest>();
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("manifest: ", e.what()));
  }
}

absl::Status VerifyManifest(const RunManifest& manifest,
                            std::string_view report_bytes) {
  const std::string actual = Sha256Hex(report_bytes);
  if (actual != manifest.report_sha256) {
    return absl::DataLossError(absl::StrCat("report hash ", actual,
                                            " does not match manifest ",
                                            manifest.report_sha256));
  }
  return absl::OkStatus();
}

}  // namespace pseudosync
