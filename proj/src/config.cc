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

#include "pseudosync/config.h"

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "pseudosync/experiments.h"
#include "presets.h"
#include "yaml-cpp/yaml.h"

namespace pseudosync {
namespace {

std::string Join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : absl::StrCat(path, ".", std::string(key));
}

std::string Index(const std::string& path, size_t i) {
  return absl::StrFormat("%s[%d]", path, i);
}

absl::Status Error(const std::string& path, const std::string& message) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", message));
}

std::string Where(const YAML::Mark& mark) {
  return absl::StrFormat("line %d, column %d", mark.line + 1, mark.column + 1);
}

absl::Status CheckMap(const YAML::Node& node, const std::string& path,
                      std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) {
    return Error(path.empty() ? "<root>" : path,
                 absl::StrCat(Where(node.Mark()), ": expected a mapping"));
  }
  const std::set<std::string_view> keys(allowed);
  for (const auto& entry : node) {
    const std::string key = entry.first.Scalar();
    if (!keys.contains(key)) {
      return Error(Join(path, key),
                   absl::StrCat(Where(entry.first.Mark()), ": unknown key"));
    }
  }
  return absl::OkStatus();
}

template <typename T>
constexpr const char* TypeName() {
  if constexpr (std::is_same_v<T, bool>) {
    return "a boolean";
  } else if constexpr (std::is_integral_v<T>) {
    return "an integer";
  } else if constexpr (std::is_floating_point_v<T>) {
    return "a number";
  } else {
    return "a string";
  }
}

template <typename T>
absl::Status Convert(const YAML::Node& node, const std::string& path, T* out) {
  if (!node.IsScalar()) {
    return Error(path, absl::StrCat(Where(node.Mark()), ": expected ",
                                    TypeName<T>()));
  }
  try {
    *out = node.as<T>();
  } catch (const YAML::Exception&) {
    return Error(path, absl::StrCat(Where(node.Mark()), ": expected ",
                                    TypeName<T>()));
  }
  return absl::OkStatus();
}

bool Present(const YAML::Node& node) { return node && !node.IsNull(); }

template <typename T>
absl::Status Read(const YAML::Node& map, std::string_view key,
                  const std::string& path, T* out, bool required = false) {
  const YAML::Node node = map[std::string(key)];
  if (!Present(node)) {
    if (required) return Error(Join(path, key), "required field is missing");
    return absl::OkStatus();
  }
  return Convert(node, Join(path, key), out);
}

template <typename T>
absl::Status ReadList(const YAML::Node& map, std::string_view key,
                      const std::string& path, std::vector<T>* out) {
  const YAML::Node node = map[std::string(key)];
  if (!Present(node)) return absl::OkStatus();
  const std::string here = Join(path, key);
  if (!node.IsSequence()) {
    return Error(here, absl::StrCat(Where(node.Mark()), ": expected a list"));
  }
  out->clear();
  for (size_t i = 0; i < node.size(); ++i) {
    T value{};
    if (absl::Status s = Convert(node[i], Index(here, i), &value); !s.ok()) {
      return s;
    }
    out->push_back(value);
  }
  return absl::OkStatus();
}

#define PS_RETURN_IF_ERROR(expr)            \
  do {                                      \
    if (absl::Status _s = (expr); !_s.ok()) \
      return _s;                            \
  } while (0)

absl::Status ReadVmu(const YAML::Node& node, const std::string& path,
                     VmuSpec* vmu) {
  PS_RETURN_IF_ERROR(
      CheckMap(node, path, {"position", "velocity", "frequency", "p"}));
  PS_RETURN_IF_ERROR(Read(node, "frequency", path, &vmu->frequency, true));
  PS_RETURN_IF_ERROR(Read(node, "position", path, &vmu->position));
  PS_RETURN_IF_ERROR(Read(node, "velocity", path, &vmu->velocity));
  if (Present(node["p"])) {
    double p = 0.0;
    PS_RETURN_IF_ERROR(Read(node, "p", path, &p));
    vmu->p = p;
  }
  return absl::OkStatus();
}

absl::Status ReadGa(const YAML::Node& node, const std::string& path,
                    GaConfig* ga) {
  PS_RETURN_IF_ERROR(CheckMap(node, path,
                              {"population", "generations", "tournament_size",
                               "crossover_rate", "mutation_rate", "elitism"}));
  PS_RETURN_IF_ERROR(Read(node, "population", path, &ga->population));
  PS_RETURN_IF_ERROR(Read(node, "generations", path, &ga->generations));
  PS_RETURN_IF_ERROR(
      Read(node, "tournament_size", path, &ga->tournament_size));
  PS_RETURN_IF_ERROR(Read(node, "crossover_rate", path, &ga->crossover_rate));
  PS_RETURN_IF_ERROR(Read(node, "mutation_rate", path, &ga->mutation_rate));
  PS_RETURN_IF_ERROR(Read(node, "elitism", path, &ga->elitism));
  return absl::OkStatus();
}

absl::Status ReadAttacker(const YAML::Node& node, const std::string& path,
                          AttackerSpec* attacker) {
  PS_RETURN_IF_ERROR(CheckMap(
      node, path, {"name", "physical", "virtual", "masked_regions"}));
  PS_RETURN_IF_ERROR(Read(node, "name", path, &attacker->name, true));
  PS_RETURN_IF_ERROR(Read(node, "physical", path, &attacker->physical));
  PS_RETURN_IF_ERROR(Read(node, "virtual", path, &attacker->virtual_layer));
  PS_RETURN_IF_ERROR(
      ReadList(node, "masked_regions", path, &attacker->masked_regions));
  return absl::OkStatus();
}

absl::Status ReadExperiment(const YAML::Node& node, const std::string& path,
                            ExperimentSpec* spec) {
  PS_RETURN_IF_ERROR(CheckMap(
      node, path, {"kind", "seeds", "first_seed", "betas", "groups"}));
  std::string kind = "none";
  PS_RETURN_IF_ERROR(Read(node, "kind", path, &kind));
  if (kind == "none") {
    spec->kind = ExperimentKind::kNone;
  } else if (kind == "fig5a") {
    spec->kind = ExperimentKind::kFig5a;
  } else if (kind == "fig5b") {
    spec->kind = ExperimentKind::kFig5b;
  } else {
    return Error(Join(path, "kind"), "must be none, fig5a or fig5b");
  }
  PS_RETURN_IF_ERROR(Read(node, "seeds", path, &spec->seeds));
  PS_RETURN_IF_ERROR(Read(node, "first_seed", path, &spec->first_seed));
  PS_RETURN_IF_ERROR(ReadList(node, "betas", path, &spec->betas));
  const YAML::Node groups = node["groups"];
  if (Present(groups)) {
    const std::string here = Join(path, "groups");
    if (!groups.IsSequence()) {
      return Error(here, absl::StrCat(Where(groups.Mark()), ": expected a list"));
    }
    spec->groups.clear();
    for (size_t g = 0; g < groups.size(); ++g) {
      const std::string group_path = Index(here, g);
      if (!groups[g].IsSequence()) {
        return Error(group_path, "expected a list of frequencies");
      }
      std::vector<double> group;
      for (size_t k = 0; k < groups[g].size(); ++k) {
        double f = 0.0;
        PS_RETURN_IF_ERROR(Convert(groups[g][k], Index(group_path, k), &f));
        group.push_back(f);
      }
      spec->groups.push_back(std::move(group));
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateExperiment(const ExperimentSpec& spec) {
  if (spec.seeds < 1) return Error("experiment.seeds", "must be at least 1");
  if (spec.betas.empty()) return Error("experiment.betas", "must not be empty");
  for (size_t b = 0; b < spec.betas.size(); ++b) {
    if (!(spec.betas[b] >= 0.0) || !std::isfinite(spec.betas[b])) {
      return Error(Index("experiment.betas", b), "must be non-negative");
    }
  }
  for (size_t g = 0; g < spec.groups.size(); ++g) {
    const std::string path = Index("experiment.groups", g);
    if (spec.groups[g].empty()) return Error(path, "must not be empty");
    for (size_t k = 0; k < spec.groups[g].size(); ++k) {
      if (!(spec.groups[g][k] >= 0.0) || !std::isfinite(spec.groups[g][k])) {
        return Error(Index(path, k), "must be non-negative");
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<RunConfig> ParseNode(const YAML::Node& root) {
  RunConfig config;
  ScenarioConfig& s = config.scenario;
  PS_RETURN_IF_ERROR(CheckMap(
      root, "",
      {"rsu_count", "coverage", "vmus", "theta", "period", "mode", "scheme",
       "solver", "beta", "h", "r", "h_max", "h_0", "h_min", "alpha",
       "delta_sync", "vmu_set_size", "vt_set_size", "async_ratio",
       "hotspot_radius", "vt_initial_stock", "broadcast_interval",
       "shuffle_interval", "rogue_vts", "misbehavior_time",
       "require_session_token", "enforce_blacklist", "check_invariants",
       "seed", "ga", "attackers", "experiment"}));
  const std::string root_path;
  PS_RETURN_IF_ERROR(Read(root, "theta", root_path, &s.theta, true));
  PS_RETURN_IF_ERROR(Read(root, "period", root_path, &s.period, true));
  const YAML::Node vmus = root["vmus"];
  if (!Present(vmus)) return Error("vmus", "required field is missing");
  if (!vmus.IsSequence()) {
    return Error("vmus", absl::StrCat(Where(vmus.Mark()), ": expected a list"));
  }
  for (size_t i = 0; i < vmus.size(); ++i) {
    VmuSpec vmu;
    PS_RETURN_IF_ERROR(ReadVmu(vmus[i], Index("vmus", i), &vmu));
    s.vmus.push_back(vmu);
  }
  PS_RETURN_IF_ERROR(Read(root, "rsu_count", root_path, &s.rsu_count));
  PS_RETURN_IF_ERROR(Read(root, "coverage", root_path, &s.coverage));
  std::string text;
  if (Present(root["mode"])) {
    PS_RETURN_IF_ERROR(Read(root, "mode", root_path, &text));
    absl::StatusOr<SyncMode> mode = ParseSyncMode(text);
    if (!mode.ok()) return Error("mode", std::string(mode.status().message()));
    s.mode = *mode;
  }
  if (Present(root["scheme"])) {
    PS_RETURN_IF_ERROR(Read(root, "scheme", root_path, &text));
    absl::StatusOr<AllocationScheme> scheme = ParseAllocationScheme(text);
    if (!scheme.ok()) {
      return Error("scheme", std::string(scheme.status().message()));
    }
    s.scheme = *scheme;
  }
  if (Present(root["solver"])) {
    PS_RETURN_IF_ERROR(Read(root, "solver", root_path, &text));
    absl::StatusOr<Solver> solver = ParseSolver(text);
    if (!solver.ok()) {
      return Error("solver", std::string(solver.status().message()));
    }
    s.solver = *solver;
  }
  PS_RETURN_IF_ERROR(Read(root, "beta", root_path, &s.beta));
  PS_RETURN_IF_ERROR(Read(root, "h", root_path, &s.h_store));
  PS_RETURN_IF_ERROR(Read(root, "r", root_path, &s.r_penalty));
  PS_RETURN_IF_ERROR(Read(root, "h_max", root_path, &s.h_max));
  PS_RETURN_IF_ERROR(Read(root, "h_0", root_path, &s.h_0));
  PS_RETURN_IF_ERROR(Read(root, "h_min", root_path, &s.h_min));
  PS_RETURN_IF_ERROR(Read(root, "alpha", root_path, &s.alpha));
  PS_RETURN_IF_ERROR(Read(root, "delta_sync", root_path, &s.delta_sync));
  PS_RETURN_IF_ERROR(Read(root, "vmu_set_size", root_path, &s.vmu_set_size));
  PS_RETURN_IF_ERROR(Read(root, "vt_set_size", root_path, &s.vt_set_size));
  PS_RETURN_IF_ERROR(Read(root, "async_ratio", root_path, &s.async_ratio));
  PS_RETURN_IF_ERROR(
      Read(root, "hotspot_radius", root_path, &s.hotspot_radius));
  PS_RETURN_IF_ERROR(
      Read(root, "vt_initial_stock", root_path, &s.vt_initial_stock));
  PS_RETURN_IF_ERROR(
      Read(root, "broadcast_interval", root_path, &s.broadcast_interval));
  PS_RETURN_IF_ERROR(
      Read(root, "shuffle_interval", root_path, &s.shuffle_interval));
  PS_RETURN_IF_ERROR(ReadList(root, "rogue_vts", root_path, &s.rogue_vts));
  PS_RETURN_IF_ERROR(
      Read(root, "misbehavior_time", root_path, &s.misbehavior_time));
  PS_RETURN_IF_ERROR(Read(root, "require_session_token", root_path,
                          &s.require_session_token));
  PS_RETURN_IF_ERROR(
      Read(root, "enforce_blacklist", root_path, &s.enforce_blacklist));
  PS_RETURN_IF_ERROR(
      Read(root, "check_invariants", root_path, &s.check_invariants));
  PS_RETURN_IF_ERROR(Read(root, "seed", root_path, &s.seed));
  if (Present(root["ga"])) PS_RETURN_IF_ERROR(ReadGa(root["ga"], "ga", &s.ga));
  const YAML::Node attackers = root["attackers"];
  if (Present(attackers)) {
    if (!attackers.IsSequence()) {
      return Error("attackers",
                   absl::StrCat(Where(attackers.Mark()), ": expected a list"));
    }
    s.attackers.clear();
    for (size_t a = 0; a < attackers.size(); ++a) {
      AttackerSpec attacker;
      PS_RETURN_IF_ERROR(
          ReadAttacker(attackers[a], Index("attackers", a), &attacker));
      s.attackers.push_back(std::move(attacker));
    }
  }
  if (Present(root["experiment"])) {
    PS_RETURN_IF_ERROR(
        ReadExperiment(root["experiment"], "experiment", &config.experiment));
  }
  if (config.experiment.kind == ExperimentKind::kFig5b &&
      config.experiment.groups.empty()) {
    config.experiment.groups = CaseStudyGroups();
  }
  PS_RETURN_IF_ERROR(s.Validate());
  PS_RETURN_IF_ERROR(ValidateExperiment(config.experiment));
  return config;
}

std::string Num(double v) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string Bool(bool b) { return b ? "true" : "false"; }

template <typename T, typename F>
std::string List(const std::vector<T>& values, F format) {
  std::string out = "[";
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format(values[i]);
  }
  return out + "]";
}

std::string NumList(const std::vector<double>& values) {
  return List(values, Num);
}

}  // namespace

std::string_view ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kNone:
      return "none";
    case ExperimentKind::kFig5a:
      return "fig5a";
    case ExperimentKind::kFig5b:
      return "fig5b";
  }
  return "none";
}

absl::StatusOr<RunConfig> ParseConfig(std::string_view text,
                                      std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s: line %d, column %d: %s", std::string(source), e.mark.line + 1,
        e.mark.column + 1, e.msg));
  }
  absl::StatusOr<RunConfig> config = ParseNode(root);
  if (!config.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(
        std::string(source), ": ", std::string(config.status().message())));
  }
  return config;
}

absl::StatusOr<RunConfig> LoadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat(path, ": cannot read file"));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str(), path);
}

std::string EmitConfig(const RunConfig& config) {
  const ScenarioConfig& s = config.scenario;
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) {
    absl::StrAppend(&out, std::string(key), ": ", value, "\n");
  };
  line("rsu_count", std::to_string(s.rsu_count));
  line("coverage", Num(s.coverage));
  line("theta", Num(s.theta));
  line("period", Num(s.period));
  line("mode", std::string(SyncModeName(s.mode)));
  line("scheme", std::string(AllocationSchemeName(s.scheme)));
  line("solver", std::string(SolverName(s.solver)));
  line("beta", Num(s.beta));
  line("h", Num(s.h_store));
  line("r", Num(s.r_penalty));
  line("h_max", Num(s.h_max));
  line("h_0", Num(s.h_0));
  line("h_min", Num(s.h_min));
  line("alpha", Num(s.alpha));
  line("delta_sync", Num(s.delta_sync));
  line("vmu_set_size", std::to_string(s.vmu_set_size));
  line("vt_set_size", std::to_string(s.vt_set_size));
  line("async_ratio", Num(s.async_ratio));
  line("hotspot_radius", Num(s.hotspot_radius));
  line("vt_initial_stock", std::to_string(s.vt_initial_stock));
  line("broadcast_interval", Num(s.broadcast_interval));
  line("shuffle_interval", Num(s.shuffle_interval));
  line("rogue_vts",
       List(s.rogue_vts, [](int v) { return std::to_string(v); }));
  line("misbehavior_time", Num(s.misbehavior_time));
  line("require_session_token", Bool(s.require_session_token));
  line("enforce_blacklist", Bool(s.enforce_blacklist));
  line("check_invariants", Bool(s.check_invariants));
  line("seed", std::to_string(s.seed));
  out += "vmus:\n";
  for (const VmuSpec& v : s.vmus) {
    absl::StrAppend(&out, "  - {position: ", Num(v.position),
                    ", velocity: ", Num(v.velocity),
                    ", frequency: ", Num(v.frequency));
    if (v.p.has_value()) absl::StrAppend(&out, ", p: ", Num(*v.p));
    out += "}\n";
  }
  absl::StrAppend(&out, "ga: {population: ", s.ga.population,
                  ", generations: ", s.ga.generations,
                  ", tournament_size: ", s.ga.tournament_size,
                  ", crossover_rate: ", Num(s.ga.crossover_rate),
                  ", mutation_rate: ", Num(s.ga.mutation_rate),
                  ", elitism: ", s.ga.elitism, "}\n");
  out += s.attackers.empty() ? "attackers: []\n" : "attackers:\n";
  for (const AttackerSpec& a : s.attackers) {
    absl::StrAppend(
        &out, "  - {name: ", Quote(a.name), ", physical: ", Bool(a.physical),
        ", virtual: ", Bool(a.virtual_layer), ", masked_regions: ",
        List(a.masked_regions, [](RsuId r) { return std::to_string(r); }),
        "}\n");
  }
  const ExperimentSpec& e = config.experiment;
  absl::StrAppend(&out, "experiment:\n  kind: ",
                  std::string(ExperimentKindName(e.kind)), "\n  seeds: ",
                  e.seeds, "\n  first_seed: ", e.first_seed,
                  "\n  betas: ", NumList(e.betas), "\n  groups: ",
                  List(e.groups, NumList), "\n");
  return out;
}

std::vector<std::string> PresetNames() {
  std::vector<std::string> names;
  for (size_t i = 0; i < internal::kPresetCount; ++i) {
    names.push_back(internal::kPresets[i].name);
  }
  return names;
}

absl::StatusOr<std::string> PresetText(std::string_view name) {
  for (size_t i = 0; i < internal::kPresetCount; ++i) {
    if (name == internal::kPresets[i].name) return internal::kPresets[i].text;
  }
  return absl::NotFoundError(
      absl::StrCat("unknown preset '", std::string(name), "'"));
}

absl::StatusOr<RunConfig> LoadPreset(std::string_view name) {
  absl::StatusOr<std::string> text = PresetText(name);
  if (!text.ok()) return text.status();
  return ParseConfig(*text, absl::StrCat("preset ", std::string(name)));
}

absl::StatusOr<RunConfig> LoadConfig(const std::string& name_or_path) {
  if (PresetText(name_or_path).ok()) return LoadPreset(name_or_path);
  return LoadConfigFile(name_or_path);
}

}  // namespace pseudosync
