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

// Deterministic discrete-event simulation of one observation period on a
// ring road covered by contiguous RSU segments.
//
// At time 0 each VMU receives its allocation as a pseudonym set (plus one
// pseudonym to start active) and each VT draws a set from its hosting RSU.
// Change requests arrive as a Poisson process per VMU; requests beyond the
// allocation are skipped and count as shortage. Synchronous mode pairs every
// VMU change with its VT at t* = request + delta_sync, batching requests
// on one RSU into groups. Asynchronous mode batches VMU changes the same way
// while each VT changes alone at async_ratio times its VMU's frequency.
//
// Events at equal times run in this order: migration, change execution,
// change request, asynchronous VT change, broadcast, misbehavior report,
// V2T injection attempt, shuffle; then by entity id, then by creation order.

#ifndef PSEUDOSYNC_SIM_H_
#define PSEUDOSYNC_SIM_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pseudosync/allocator.h"
#include "pseudosync/entropy.h"
#include "pseudosync/genetic.h"
#include "pseudosync/ledger.h"
#include "pseudosync/protocol.h"

namespace pseudosync {

enum class SyncMode : uint8_t { kSynchronous, kAsynchronous };
enum class AllocationScheme : uint8_t { kOnDemand, kEqual };
enum class Solver : uint8_t { kGa, kExact };

std::string_view SyncModeName(SyncMode mode);
std::string_view AllocationSchemeName(AllocationScheme scheme);
std::string_view SolverName(Solver solver);
absl::StatusOr<SyncMode> ParseSyncMode(std::string_view text);
absl::StatusOr<AllocationScheme> ParseAllocationScheme(std::string_view text);
absl::StatusOr<Solver> ParseSolver(std::string_view text);

struct VmuSpec {
  double position = 0.0;
  double velocity = 1.0;
  double frequency = 1.0;
  std::optional<double> p;  // drawn from U(0, 0.5] when absent

  bool operator==(const VmuSpec&) const = default;
};

struct AttackerSpec {
  std::string name;
  bool physical = true;
  bool virtual_layer = true;
  std::vector<RsuId> masked_regions;

  bool operator==(const AttackerSpec&) const = default;
};

std::vector<AttackerSpec> DefaultAttackers();

struct ScenarioConfig {
  int rsu_count = 6;
  double coverage = 10.0;
  std::vector<VmuSpec> vmus;
  double theta = 10.0;
  double period = 60.0;
  SyncMode mode = SyncMode::kSynchronous;
  AllocationScheme scheme = AllocationScheme::kOnDemand;
  Solver solver = Solver::kGa;
  double beta = 1.0;
  double h_store = 0.1;
  double r_penalty = 0.3;
  double h_max = 1.5;
  double h_0 = 1.0;
  double h_min = 0.25;
  double alpha = 1.0;
  double delta_sync = 1.0;
  int vmu_set_size = 5;
  int vt_set_size = 5;
  double async_ratio = 4.0;
  double hotspot_radius = 10.0;
  int vt_initial_stock = 200;
  double broadcast_interval = 1.0;
  double shuffle_interval = 10.0;
  std::vector<int> rogue_vts;  // VMU indices whose twin misbehaves
  double misbehavior_time = 30.0;
  bool require_session_token = true;
  bool enforce_blacklist = true;
  bool check_invariants = true;
  GaConfig ga;
  std::vector<AttackerSpec> attackers = DefaultAttackers();
  uint64_t seed = 1;

  // Errors name the offending field, e.g. "vmus[2].frequency".
  absl::Status Validate() const;
  double RoadLength() const { return rsu_count * coverage; }
  bool operator==(const ScenarioConfig&) const = default;
};

struct VmuResult {
  int index = 0;
  double frequency = 0.0;
  double p = 0.0;
  double avg_entropy = 0.0;
  int64_t allocation = 0;
  int64_t demand = 0;
  int64_t served = 0;
  int64_t shortage = 0;
  int64_t leftover = 0;
  double realized_utility = 0.0;
  double expected_utility = 0.0;
  std::vector<double> change_epochs;
  std::vector<size_t> group_sizes;
  std::vector<EntropyPoint> timeline;

  bool operator==(const VmuResult&) const = default;
};

struct AttackerResult {
  std::string name;
  std::vector<double> tracked_fraction;  // per VMU
  double mean_tracked_fraction = 0.0;

  bool operator==(const AttackerResult&) const = default;
};

struct SecurityCounters {
  uint64_t v2t_attempts = 0;
  uint64_t v2t_accepted = 0;
  uint64_t t2t_attempts = 0;
  uint64_t t2t_accepted = 0;
  uint64_t reports_filed = 0;
  uint64_t reports_rejected = 0;
  uint64_t blacklisted = 0;

  bool operator==(const SecurityCounters&) const = default;
};

struct LedgerEntry {
  uint64_t index = 0;
  double epoch = 0.0;
  std::string block_hash;

  bool operator==(const LedgerEntry&) const = default;
};

struct SimReport {
  ScenarioConfig config;
  std::string rng_algorithm;
  std::string hash_function;
  int64_t budget = 0;
  int64_t allocated_total = 0;
  std::vector<VmuResult> vmus;
  double total_realized_utility = 0.0;
  double mean_realized_utility = 0.0;
  double total_expected_utility = 0.0;
  double mean_expected_utility = 0.0;
  std::vector<AttackerResult> attackers;
  SecurityCounters security;
  std::vector<LedgerEntry> ledger;
  std::string ledger_head;
  std::vector<CaLogRecord> ca_log;
  uint64_t events_processed = 0;
  uint64_t invariant_checks = 0;
  std::vector<std::string> invariant_violations;

  bool operator==(const SimReport&) const = default;
};

// Derived per-VMU inputs shared by the simulation and the allocator-only
// paths: entropy parameters (with p drawn from the seed when unset) and the
// allocation problem.
struct PreparedScenario {
  std::vector<EntropyParams> entropy;
  AllocationProblem problem;
};

absl::StatusOr<PreparedScenario> Prepare(const ScenarioConfig& config);

absl::StatusOr<AllocationPlan> ChooseAllocation(const ScenarioConfig& config,
                                                const AllocationProblem& problem);

// Runs the scenario. When chain is non-null it receives the shuffle ledger.
absl::StatusOr<SimReport> RunScenario(const ScenarioConfig& config,
                                      Chain* chain = nullptr);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_SIM_H_
