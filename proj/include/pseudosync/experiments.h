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

// Comparative experiments built on the simulator: on-demand versus equal
// allocation for one VMU population, and per-group utility across a sweep of
// the unit change profit.

#ifndef PSEUDOSYNC_EXPERIMENTS_H_
#define PSEUDOSYNC_EXPERIMENTS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pseudosync/sim.h"

namespace pseudosync {

inline constexpr double kReferenceImprovementPercent = 33.8;

// Six VMUs with frequencies 1, 1.2, ..., 2 on the default road.
ScenarioConfig CaseStudyConfig();

// Frequencies {1, 1.2, 1.4}, {2, 2.2, 2.4}, {3, 3.2, 3.4}.
std::vector<std::vector<double>> CaseStudyGroups();

std::vector<uint64_t> SeedRange(uint64_t first, int count);

// 100 * (a - b) / |b|, or 0 when both are 0.
double ImprovementPercent(double a, double b);

struct SchemeOutcome {
  std::vector<int64_t> allocation;
  std::vector<int64_t> demand;
  std::vector<double> realized;
  std::vector<double> expected;
  double mean_realized = 0.0;
  double mean_expected = 0.0;

  bool operator==(const SchemeOutcome&) const = default;
};

struct Fig5aSeed {
  uint64_t seed = 0;
  std::vector<double> p;
  SchemeOutcome on_demand;
  SchemeOutcome equal;
  double improvement_percent = 0.0;           // realized
  double expected_improvement_percent = 0.0;  // expected
  bool mean_improved = false;                 // realized, strict
  bool every_vmu_dominates = false;           // realized, per VMU >=

  bool operator==(const Fig5aSeed&) const = default;
};

struct Summary {
  double min = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;

  bool operator==(const Summary&) const = default;
};

Summary Summarize(std::vector<double> values);

struct Fig5aResult {
  ScenarioConfig base;
  std::vector<double> frequencies;
  std::vector<Fig5aSeed> seeds;
  // Per VMU, averaged over seeds.
  std::vector<double> mean_on_demand;
  std::vector<double> mean_equal;
  std::vector<double> mean_on_demand_expected;
  std::vector<double> mean_equal_expected;
  // Improvement of the across-seed mean utility.
  double improvement_percent = 0.0;
  double expected_improvement_percent = 0.0;
  Summary improvement_distribution;
  int seeds_mean_improved = 0;
  int seeds_every_vmu_dominates = 0;
  int expected_seeds_every_vmu_dominates = 0;

  bool operator==(const Fig5aResult&) const = default;
};

// Runs both schemes on every seed with shared demand draws.
absl::StatusOr<Fig5aResult> RunFig5a(const ScenarioConfig& base,
                                     const std::vector<uint64_t>& seeds);

struct Fig5bCell {
  int group = 0;  // 1-based
  double beta = 0.0;
  uint64_t seed = 0;
  double global_utility = 0.0;  // sum of realized utilities
  double mean_utility = 0.0;
  double global_expected_utility = 0.0;

  bool operator==(const Fig5bCell&) const = default;
};

struct Fig5bResult {
  ScenarioConfig base;
  std::vector<std::vector<double>> groups;
  std::vector<double> betas;
  std::vector<uint64_t> seeds;
  std::vector<Fig5bCell> cells;  // group-major, then beta, then seed
  // Indexed [group][beta], averaged over seeds.
  std::vector<std::vector<double>> mean_global_utility;
  std::vector<std::vector<double>> mean_global_expected_utility;
  // A (beta, seed) cell passes when the groups are strictly ordered by index
  // and no group lost utility relative to the previous beta.
  int cells_total = 0;
  int cells_passing = 0;

  const Fig5bCell& At(size_t group, size_t beta, size_t seed) const;
  bool operator==(const Fig5bResult&) const = default;
};

// Each group is simulated as its own population under the on-demand scheme
// with the full budget of the base config.
absl::StatusOr<Fig5bResult> RunFig5b(
    const ScenarioConfig& base, const std::vector<std::vector<double>>& groups,
    const std::vector<double>& betas, const std::vector<uint64_t>& seeds);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_EXPERIMENTS_H_
