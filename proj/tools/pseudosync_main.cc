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

// Command-line front end: simulate, optimize, attack-eval, reproduce and
// verify-chain. Exit codes: 0 success, 2 configuration error, 3 runtime
// error, 4 chain verification failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "pseudosync/allocator.h"
#include "pseudosync/config.h"
#include "pseudosync/experiments.h"
#include "pseudosync/ledger.h"
#include "pseudosync/report.h"
#include "pseudosync/sim.h"

namespace pseudosync {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitChain = 4;
constexpr char kSeedEnv[] = "PSEUDOSYNC_SEED";

struct GlobalOptions {
  std::optional<uint64_t> seed;
  std::optional<int> seeds;
  std::string out;
  std::string format = "table";
  std::string mode;
  std::string scheme;
};

struct Failure {
  int code;
  std::string message;
};

// Resolved inputs shared by every subcommand.
struct Context {
  RunConfig config;
  ReportFormat format = ReportFormat::kTable;
  std::string seed_source = "config";
  std::string command;
};

// One file to emit. The first output is the report that the manifest pins.
struct Output {
  std::string name;
  std::string bytes;
};

std::optional<Failure> ApplyOverrides(const GlobalOptions& options,
                                      Context* context) {
  ScenarioConfig& scenario = context->config.scenario;
  if (options.seed.has_value()) {
    scenario.seed = *options.seed;
    context->seed_source = "flag";
  } else if (const char* env = std::getenv(kSeedEnv); env != nullptr) {
    uint64_t seed = 0;
    std::istringstream in(env);
    if (!(in >> seed) || !in.eof()) {
      return Failure{kExitConfig,
                     absl::StrCat(kSeedEnv, ": not an unsigned integer")};
    }
    scenario.seed = seed;
    context->seed_source = absl::StrCat("env:", kSeedEnv);
  }
  if (!options.mode.empty()) {
    absl::StatusOr<SyncMode> mode = ParseSyncMode(options.mode);
    if (!mode.ok()) {
      return Failure{kExitConfig, std::string(mode.status().message())};
    }
    scenario.mode = *mode;
  }
  if (!options.scheme.empty()) {
    absl::StatusOr<AllocationScheme> scheme =
        ParseAllocationScheme(options.scheme);
    if (!scheme.ok()) {
      return Failure{kExitConfig, std::string(scheme.status().message())};
    }
    scenario.scheme = *scheme;
  }
  if (options.seeds.has_value()) {
    if (*options.seeds < 1) return Failure{kExitConfig, "--seeds must be >= 1"};
    context->config.experiment.seeds = *options.seeds;
  }
  absl::StatusOr<ReportFormat> format = ParseReportFormat(options.format);
  if (!format.ok()) {
    return Failure{kExitConfig, std::string(format.status().message())};
  }
  context->format = *format;
  if (absl::Status s = scenario.Validate(); !s.ok()) {
    return Failure{kExitConfig, std::string(s.message())};
  }
  return std::nullopt;
}

std::optional<Failure> Load(const std::string& source,
                            const GlobalOptions& options, Context* context) {
  absl::StatusOr<RunConfig> config = LoadConfig(source);
  if (!config.ok()) {
    return Failure{kExitConfig, std::string(config.status().message())};
  }
  context->config = *std::move(config);
  return ApplyOverrides(options, context);
}

Failure Runtime(const absl::Status& status) {
  return Failure{kExitRuntime, std::string(status.message())};
}

std::optional<Failure> WriteFile(const std::filesystem::path& path,
                                 const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) {
    return Failure{kExitRuntime,
                   absl::StrCat(path.string(), ": cannot write file")};
  }
  return std::nullopt;
}

// Prints the report to stdout, or writes every output plus manifest.json
// under out_dir once all of them are ready.
std::optional<Failure> Emit(const Context& context, const std::string& out_dir,
                            const std::vector<uint64_t>& seeds,
                            const std::vector<Output>& outputs) {
  if (out_dir.empty()) {
    std::cout << outputs.front().bytes;
    return std::nullopt;
  }
  std::error_code error;
  std::filesystem::create_directories(out_dir, error);
  if (error) {
    return Failure{kExitRuntime,
                   absl::StrCat(out_dir, ": ", error.message())};
  }
  RunManifest manifest;
  manifest.tool_version = std::string(ToolVersion());
  manifest.command = context.command;
  manifest.config = EmitConfig(context.config);
  manifest.seeds = seeds;
  manifest.seed_source = context.seed_source;
  for (const Output& output : outputs) {
    const std::filesystem::path path =
        std::filesystem::path(out_dir) / output.name;
    if (auto failure = WriteFile(path, output.bytes)) return failure;
    manifest.outputs.push_back({path.string(), Sha256Hex(output.bytes)});
  }
  manifest.report_path = manifest.outputs.front().path;
  manifest.report_sha256 = manifest.outputs.front().sha256;
  const std::filesystem::path manifest_path =
      std::filesystem::path(out_dir) / "manifest.json";
  if (auto failure = WriteFile(manifest_path, ToJson(manifest))) {
    return failure;
  }
  std::cerr << "wrote " << manifest.report_path << " and "
            << manifest_path.string() << "\n";
  return std::nullopt;
}

std::string ReportName(const Context& context) {
  return absl::StrCat("report", std::string(ReportExtension(context.format)));
}

std::optional<Failure> Simulate(const Context& context,
                                const std::string& out_dir) {
  Chain chain;
  absl::StatusOr<SimReport> report =
      RunScenario(context.config.scenario, &chain);
  if (!report.ok()) return Runtime(report.status());
  std::vector<Output> outputs = {
      {ReportName(context), Render(*report, context.format)}};
  if (context.format == ReportFormat::kCsv) {
    outputs.push_back({"timelines.csv", TimelineCsv(*report)});
  }
  const std::vector<uint8_t> ledger = ExportChain(chain);
  outputs.push_back({"ledger.bin", std::string(ledger.begin(), ledger.end())});
  return Emit(context, out_dir, {context.config.scenario.seed}, outputs);
}

std::optional<Failure> Optimize(const Context& context,
                                const std::string& out_dir) {
  const ScenarioConfig& scenario = context.config.scenario;
  absl::StatusOr<PreparedScenario> prepared = Prepare(scenario);
  if (!prepared.ok()) return Runtime(prepared.status());
  absl::StatusOr<AllocationPlan> plan =
      ChooseAllocation(scenario, prepared->problem);
  if (!plan.ok()) return Runtime(plan.status());
  const AllocationPlan equal = EqualAllocation(prepared->problem);
  const AllocationProblem& problem = prepared->problem;
  std::string text;
  switch (context.format) {
    case ReportFormat::kCsv:
      text = "vmu_index,frequency,p,avg_entropy,allocation,expected_utility\n";
      for (size_t i = 0; i < problem.vmus.size(); ++i) {
        text += absl::StrFormat(
            "%d,%.9g,%.9g,%.9g,%d,%.9g\n", i, scenario.vmus[i].frequency,
            prepared->entropy[i].p, problem.vmus[i].utility.avg_entropy,
            plan->r[i],
            ExpectedUtility(plan->r[i], problem.vmus[i].demand,
                            problem.vmus[i].utility));
      }
      break;
    case ReportFormat::kJsonLines:
      text = nlohmann::json{
                 {"record", "allocation"},
                 {"scheme", std::string(AllocationSchemeName(scenario.scheme))},
                 {"solver", std::string(SolverName(scenario.solver))},
                 {"budget", problem.budget},
                 {"allocation", plan->r},
                 {"objective", ExpectedObjective(problem, *plan)},
                 {"equal_allocation", equal.r},
                 {"equal_objective", ExpectedObjective(problem, equal)}}
                 .dump() +
             "\n";
      break;
    case ReportFormat::kTable:
      text = absl::StrFormat("budget %d, scheme %s, solver %s\n\n",
                             problem.budget,
                             std::string(AllocationSchemeName(scenario.scheme)),
                             std::string(SolverName(scenario.solver)));
      text += " vmu  frequency      p  avg_entropy  allocation  expected\n";
      for (size_t i = 0; i < problem.vmus.size(); ++i) {
        text += absl::StrFormat(
            "%4d  %9.2f  %5.3f  %11.4f  %10d  %8.2f\n", i,
            scenario.vmus[i].frequency, prepared->entropy[i].p,
            problem.vmus[i].utility.avg_entropy, plan->r[i],
            ExpectedUtility(plan->r[i], problem.vmus[i].demand,
                            problem.vmus[i].utility));
      }
      text += absl::StrFormat(
          "\nexpected global utility %.4f (equal allocation %.4f, %.1f%%)\n",
          ExpectedObjective(problem, *plan), ExpectedObjective(problem, equal),
          ImprovementPercent(ExpectedObjective(problem, *plan),
                             ExpectedObjective(problem, equal)));
      break;
  }
  return Emit(context, out_dir, {scenario.seed}, {{ReportName(context), text}});
}

std::optional<Failure> AttackEval(const Context& context,
                                  const std::string& out_dir) {
  absl::StatusOr<SimReport> report = RunScenario(context.config.scenario);
  if (!report.ok()) return Runtime(report.status());
  std::string text;
  switch (context.format) {
    case ReportFormat::kCsv:
      text = "attacker,vmu_index,tracked_fraction\n";
      for (const AttackerResult& a : report->attackers) {
        for (size_t i = 0; i < a.tracked_fraction.size(); ++i) {
          text += absl::StrFormat("%s,%d,%.9g\n", a.name, i,
                                  a.tracked_fraction[i]);
        }
      }
      break;
    case ReportFormat::kJsonLines:
      for (const AttackerResult& a : report->attackers) {
        text += nlohmann::json{{"record", "attacker"},
                               {"name", a.name},
                               {"tracked_fraction", a.tracked_fraction},
                               {"mean_tracked_fraction",
                                a.mean_tracked_fraction}}
                    .dump() +
                "\n";
      }
      break;
    case ReportFormat::kTable:
      text = absl::StrFormat("mode %s, %d VMUs, seed %d\n\n",
                             std::string(SyncModeName(report->config.mode)),
                             report->vmus.size(), report->config.seed);
      text += "attacker    mean    per VMU\n";
      for (const AttackerResult& a : report->attackers) {
        text += absl::StrFormat("%-10s  %.4f ", a.name, a.mean_tracked_fraction);
        for (double f : a.tracked_fraction) text += absl::StrFormat(" %.3f", f);
        text += "\n";
      }
      break;
  }
  return Emit(context, out_dir, {report->config.seed},
              {{ReportName(context), text}});
}

std::optional<Failure> Reproduce(const std::string& which,
                                 const std::string& config_source,
                                 const GlobalOptions& options,
                                 Context* context) {
  const std::string preset = which == "fig5a"   ? "paper_fig5a"
                             : which == "fig5b" ? "paper_fig5b"
                                                : "";
  if (preset.empty()) {
    return Failure{kExitConfig,
                   absl::StrCat("unknown experiment '", which,
                                "', expected fig5a or fig5b")};
  }
  if (auto failure = Load(config_source.empty() ? preset : config_source,
                          options, context)) {
    return failure;
  }
  const ExperimentSpec& spec = context->config.experiment;
  const uint64_t first =
      context->seed_source == "config" ? spec.first_seed
                                       : context->config.scenario.seed;
  const std::vector<uint64_t> seeds = SeedRange(first, spec.seeds);
  const std::string name = ReportName(*context);
  if (which == "fig5a") {
    absl::StatusOr<Fig5aResult> result =
        RunFig5a(context->config.scenario, seeds);
    if (!result.ok()) return Runtime(result.status());
    return Emit(*context, options.out, seeds,
                {{name, Render(*result, context->format)}});
  }
  std::vector<std::vector<double>> groups = spec.groups;
  if (groups.empty()) groups = CaseStudyGroups();
  absl::StatusOr<Fig5bResult> result =
      RunFig5b(context->config.scenario, groups, spec.betas, seeds);
  if (!result.ok()) return Runtime(result.status());
  return Emit(*context, options.out, seeds,
              {{name, Render(*result, context->format)}});
}

int VerifyChainFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": cannot read file\n";
    return kExitRuntime;
  }
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (std::optional<size_t> bad = VerifyChainBytes(bytes)) {
    std::cout << "chain invalid at block " << *bad << "\n";
    return kExitChain;
  }
  absl::StatusOr<Chain> chain = ImportChain(bytes);
  std::cout << "chain ok: " << (chain.ok() ? chain->size() : 0)
            << " blocks, head "
            << (chain.ok() ? DigestHex(chain->head_hash()) : "") << "\n";
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Pseudonym change simulator and allocation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ToolVersion()));
  GlobalOptions options;
  auto add_globals = [&options](CLI::App* command) {
    command->add_option("--seed", options.seed,
                        absl::StrCat("Master seed (overrides ", kSeedEnv,
                                     " and the config)"));
    command->add_option("--seeds", options.seeds,
                        "Number of seeds for reproduce");
    command->add_option("--out", options.out,
                        "Output directory; stdout when omitted");
    command->add_option("--format", options.format, "table, csv or jsonl")
        ->capture_default_str();
    command->add_option("--mode", options.mode, "sync or async");
    command->add_option("--scheme", options.scheme, "on_demand or equal");
  };

  std::string config_source;
  std::string experiment;
  std::string chain_path;
  CLI::App* simulate = app.add_subcommand("simulate", "Run one scenario");
  CLI::App* optimize =
      app.add_subcommand("optimize", "Allocate pseudonyms without simulating");
  CLI::App* attack = app.add_subcommand(
      "attack-eval", "Run one scenario and report attacker tracking");
  for (CLI::App* command : {simulate, optimize, attack}) {
    command->add_option("config", config_source, "Preset name or YAML path")
        ->required();
    add_globals(command);
  }
  CLI::App* reproduce =
      app.add_subcommand("reproduce", "Run a comparative experiment");
  reproduce->add_option("experiment", experiment, "fig5a or fig5b")->required();
  reproduce->add_option("--config", config_source,
                        "Preset name or YAML path replacing the default");
  add_globals(reproduce);
  CLI::App* verify =
      app.add_subcommand("verify-chain", "Verify an exported shuffle ledger");
  verify->add_option("file", chain_path, "Ledger file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (verify->parsed()) return VerifyChainFile(chain_path);

  Context context;
  std::optional<Failure> failure;
  if (reproduce->parsed()) {
    context.command = absl::StrCat("reproduce ", experiment);
    failure = Reproduce(experiment, config_source, options, &context);
  } else {
    CLI::App* command = simulate->parsed()   ? simulate
                        : optimize->parsed() ? optimize
                                             : attack;
    context.command = command->get_name();
    failure = Load(config_source, options, &context);
    if (!failure) {
      if (command == simulate) {
        failure = Simulate(context, options.out);
      } else if (command == optimize) {
        failure = Optimize(context, options.out);
      } else {
        failure = AttackEval(context, options.out);
      }
    }
  }
  if (failure) {
    std::cerr << "error: " << failure->message << "\n";
    return failure->code;
  }
  return kExitOk;
}

}  // namespace
}  // namespace pseudosync

int main(int argc, char** argv) { return pseudosync::Main(argc, argv); }
