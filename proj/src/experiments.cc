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

#include "pseudosync/experiments.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace pseudosync {
namespace {

// Spreads VMUs one per segment, alternating direction.
std::vector<VmuSpec> PlaceVmus(const std::vector<double>& frequencies,
                               const ScenarioConfig& config) {
  std::vector<VmuSpec> vmus;
  for (size_t k = 0; k < frequencies.size(); ++k) {
    VmuSpec vmu;
    vmu.frequency = frequencies[k];
    vmu.position = std::fmod((static_cast<double>(k) + 0.5) * config.coverage,
                             config.RoadLength());
    vmu.velocity = k % 2 == 0 ? 1.0 : -1.0;
    vmus.push_back(vmu);
  }
  return vmus;
}

SchemeOutcome Outcome(const SimReport& report) {
  SchemeOutcome outcome;
  for (const VmuResult& vmu : report.vmus) {
    outcome.allocation.push_back(vmu.allocation);
    outcome.demand.push_back(vmu.demand);
    outcome.realized.push_back(vmu.realized_utility);
    outcome.expected.push_back(vmu.expected_utility);
  }
  outcome.mean_realized = report.mean_realized_utility;
  outcome.mean_expected = report.mean_expected_utility;
  return outcome;
}

bool Dominates(const std::vector<double>& a, const std::vector<double>& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
  }
  return true;
}

double Mean(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return values.empty() ? 0.0 : total / static_cast<double>(values.size());
}

}  // namespace

ScenarioConfig CaseStudyConfig() {
  ScenarioConfig config;
  config.vmus = PlaceVmus({1.0, 1.2, 1.4, 1.6, 1.8, 2.0}, config);
  return config;
}

std::vector<std::vector<double>> CaseStudyGroups() {
  return {{1.0, 1.2, 1.4}, {2.0, 2.2, 2.4}, {3.0, 3.2, 3.4}};
}

std::vector<uint64_t> SeedRange(uint64_t first, int count) {
  std::vector<uint64_t> seeds;
  for (int k = 0; k < count; ++k) seeds.push_back(first + k);
  return seeds;
}

double ImprovementPercent(double a, double b) {
  if (a == b) return 0.0;
  return 100.0 * (a - b) / std::abs(b);
}

Summary Summarize(std::vector<double> values) {
  Summary summary;
  if (values.empty()) return summary;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  summary.min = values.front();
  summary.max = values.back();
  summary.median = n % 2 == 1 ? values[n / 2]
                              : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  summary.mean = Mean(values);
  return summary;
}

absl::StatusOr<Fig5aResult> RunFig5a(const ScenarioConfig& base,
                                     const std::vector<uint64_t>& seeds) {
  if (seeds.empty()) return absl::InvalidArgumentError("seeds: empty");
  Fig5aResult result;
  result.base = base;
  for (const VmuSpec& vmu : base.vmus) {
    result.frequencies.push_back(vmu.frequency);
  }
  const size_t m = base.vmus.size();
  result.mean_on_demand.assign(m, 0.0);
  result.mean_equal.assign(m, 0.0);
  result.mean_on_demand_expected.assign(m, 0.0);
  result.mean_equal_expected.assign(m, 0.0);
  std::vector<double> improvements;
  double on_demand_total = 0.0;
  double equal_total = 0.0;
  double on_demand_expected_total = 0.0;
  double equal_expected_total = 0.0;
  for (uint64_t seed : seeds) {
    ScenarioConfig config = base;
    config.seed = seed;
    config.scheme = AllocationScheme::kOnDemand;
    absl::StatusOr<SimReport> on_demand = RunScenario(config);
    if (!on_demand.ok()) return on_demand.status();
    config.scheme = AllocationScheme::kEqual;
    absl::StatusOr<SimReport> equal = RunScenario(config);
    if (!equal.ok()) return equal.status();

    Fig5aSeed row;
    row.seed = seed;
    for (const VmuResult& vmu : on_demand->vmus) row.p.push_back(vmu.p);
    row.on_demand = Outcome(*on_demand);
    row.equal = Outcome(*equal);
    row.improvement_percent = ImprovementPercent(row.on_demand.mean_realized,
                                                 row.equal.mean_realized);
    row.expected_improvement_percent = ImprovementPercent(
        row.on_demand.mean_expected, row.equal.mean_expected);
    row.mean_improved = row.on_demand.mean_realized > row.equal.mean_realized;
    row.every_vmu_dominates =
        Dominates(row.on_demand.realized, row.equal.realized);
    result.seeds_mean_improved += row.mean_improved ? 1 : 0;
    result.seeds_every_vmu_dominates += row.every_vmu_dominates ? 1 : 0;
    result.expected_seeds_every_vmu_dominates +=
        Dominates(row.on_demand.expected, row.equal.expected) ? 1 : 0;
    const double n = static_cast<double>(seeds.size());
    for (size_t i = 0; i < m; ++i) {
      result.mean_on_demand[i] += row.on_demand.realized[i] / n;
      result.mean_equal[i] += row.equal.realized[i] / n;
      result.mean_on_demand_expected[i] += row.on_demand.expected[i] / n;
      result.mean_equal_expected[i] += row.equal.expected[i] / n;
    }
    on_demand_total += row.on_demand.mean_realized;
    equal_total += row.equal.mean_realized;
    on_demand_expected_total += row.on_demand.mean_expected;
    equal_expected_total += row.equal.mean_expected;
    improvements.push_back(row.improvement_percent);
    result.seeds.push_back(std::move(row));
  }
  result.improvement_percent = ImprovementPercent(on_demand_total, equal_total);
  result.expected_improvement_percent =
      ImprovementPercent(on_demand_expected_total, equal_expected_total);
  result.improvement_distribution = Summarize(std::move(improvements));
  return result;
}

const Fig5bCell& Fig5bResult::At(size_t group, size_t beta,
                                 size_t seed) const {
  return cells[(group * betas.size() + beta) * seeds.size() + seed];
}

absl::StatusOr<Fig5bResult> RunFig5b(
    const ScenarioConfig& base, const std::vector<std::vector<double>>& groups,
    const std::vector<double>& betas, const std::vector<uint64_t>& seeds) {
  if (groups.empty()) return absl::InvalidArgumentError("groups: empty");
  if (betas.empty()) return absl::InvalidArgumentError("betas: empty");
  if (seeds.empty()) return absl::InvalidArgumentError("seeds: empty");
  Fig5bResult result;
  result.base = base;
  result.groups = groups;
  result.betas = betas;
  result.seeds = seeds;
  result.mean_global_utility.assign(groups.size(),
                                    std::vector<double>(betas.size(), 0.0));
  result.mean_global_expected_utility = result.mean_global_utility;
  for (size_t g = 0; g < groups.size(); ++g) {
    for (size_t b = 0; b < betas.size(); ++b) {
      for (uint64_t seed : seeds) {
        ScenarioConfig config = base;
        config.vmus = PlaceVmus(groups[g], base);
        config.beta = betas[b];
        config.seed = seed;
        config.scheme = AllocationScheme::kOnDemand;
        absl::StatusOr<SimReport> report = RunScenario(config);
        if (!report.ok()) {
          return absl::Status(
              report.status().code(),
              absl::StrFormat("group %d beta %g: %s", g + 1, betas[b],
                              std::string(report.status().message())));
        }
        Fig5bCell cell;
        cell.group = static_cast<int>(g + 1);
        cell.beta = betas[b];
        cell.seed = seed;
        cell.global_utility = report->total_realized_utility;
        cell.mean_utility = report->mean_realized_utility;
        cell.global_expected_utility = report->total_expected_utility;
        const double n = static_cast<double>(seeds.size());
        result.mean_global_utility[g][b] += cell.global_utility / n;
        result.mean_global_expected_utility[g][b] +=
            cell.global_expected_utility / n;
        result.cells.push_back(cell);
      }
    }
  }
  for (size_t b = 0; b < betas.size(); ++b) {
    for (size_t s = 0; s < seeds.size(); ++s) {
      bool pass = true;
      for (size_t g = 0; g < groups.size(); ++g) {
        const double here = result.At(g, b, s).global_utility;
        if (g > 0 && !(here > result.At(g - 1, b, s).global_utility)) {
          pass = false;
        }
        if (b > 0 && here < result.At(g, b - 1, s).global_utility) {
          pass = false;
        }
      }
      ++result.cells_total;
      result.cells_passing += pass ? 1 : 0;
    }
  }
  return result;
}

}  // namespace pseudosync
