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

// Linkage-mapping attacker. The attacker eavesdrops safety messages on the
// physical layer and twin traffic on the virtual layer, links VMU and VT
// pseudonyms whose observations are spatio-temporally consistent, and tries
// to follow one target across pseudonym changes.
//
// Re-identification at a change boundary:
//   * a layer the attacker sees keeps its pseudonym across the boundary:
//     the target is followed with probability 1;
//   * the changed layer is invisible to the attacker: nothing to follow,
//     probability 1;
//   * otherwise the target hides among the G co-changing members and is
//     picked uniformly, probability 1/G.
// Changes inside a masked region lose the target. A lost target stays lost.

#ifndef PSEUDOSYNC_ADVERSARY_H_
#define PSEUDOSYNC_ADVERSARY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "pseudosync/types.h"

namespace pseudosync {

enum class Layer : uint8_t { kPhysical = 0, kVirtual = 1 };

struct Observation {
  double time = 0.0;
  Layer layer = Layer::kPhysical;
  PseudonymId pid;
  RsuId region = 0;
  double velocity = 0.0;
  int heading = 0;  // direction bucket
};

struct Observability {
  bool physical = true;
  bool virtual_layer = true;
  std::set<RsuId> masked_regions;

  bool Sees(Layer layer, RsuId region) const;
  static Observability Global() { return {true, true, {}}; }
  static Observability Roadside() { return {true, false, {}}; }
  static Observability ServiceProvider() { return {false, true, {}}; }
};

// Two observations on different layers are linked when they are this close
// in time and agree on region and features.
inline constexpr double kLinkWindow = 0.5;

struct AttackerBelief {
  bool tracking = true;
  std::optional<PseudonymId> vmu_pid;
  std::optional<PseudonymId> vt_pid;
  std::map<PseudonymId, std::set<PseudonymId>> links;  // VMU -> VTs
  std::optional<Observation> last_physical;
  std::optional<Observation> last_virtual;
  std::vector<size_t> candidate_counts;  // per boundary
};

struct ChangeEvent {
  double time = 0.0;
  bool vmu_changed = false;
  bool vt_changed = false;
  size_t group_size = 1;
  bool synchronous = false;
  RsuId region = 0;
  PseudonymId new_vmu_pid;
  PseudonymId new_vt_pid;
};

struct BoundaryOutcome {
  double time = 0.0;
  bool reidentified = false;
  size_t candidates = 1;
  double probability = 1.0;

  bool operator==(const BoundaryOutcome&) const = default;
};

// One target's view of a scenario: its observations and change events, both
// sorted by time.
struct ScenarioTrace {
  double horizon = 0.0;
  PseudonymId initial_vmu_pid;
  PseudonymId initial_vt_pid;
  RsuId initial_region = 0;
  std::vector<Observation> observations;
  std::vector<ChangeEvent> changes;
};

struct AttackerConfig {
  Observability observability;
  uint64_t seed = 0;
};

struct TrackRecord {
  double horizon = 0.0;
  std::vector<std::pair<double, double>> tracked_intervals;
  double tracked_fraction = 0.0;
  std::vector<BoundaryOutcome> boundaries;
  std::map<PseudonymId, std::set<PseudonymId>> links;

  bool operator==(const TrackRecord&) const = default;
};

AttackerBelief Observe(AttackerBelief belief, const Observation& obs,
                       const Observability& observability);

// Probability that the attacker follows the target across change.
double ReidentifyProbability(const AttackerBelief& belief,
                             const ChangeEvent& change,
                             const Observability& observability);

// Draws the boundary outcome. The uniform draw depends only on (seed,
// boundary_index), so replays under different observability share draws.
BoundaryOutcome BoundaryReidentify(const AttackerBelief& belief,
                                   const ChangeEvent& change,
                                   const Observability& observability,
                                   uint64_t seed, uint64_t boundary_index);

TrackRecord TrackingFraction(const ScenarioTrace& trace,
                             const AttackerConfig& attacker);

struct CadenceScenario {
  double vt_period = 1.0;  // T2
  double ratio = 4.0;      // T1 = ratio * T2
  double vt_offset = 0.5;
  double horizon = 8.5;
  double observation_step = 0.5;
  // Group size at each VMU change; synchronous scenarios change both layers.
  size_t group_size = 1;
  bool synchronous = false;
};

// Single-target trace with VMU changes every T1 and, when asynchronous, VT
// changes every T2 starting at vt_offset. The default is the two-VMU-change,
// eight-VT-change timeline.
ScenarioTrace BuildCadenceTrace(const CadenceScenario& scenario);

// Trace with k synchronous changes, each inside a group of size g, at
// times 1..k over horizon k + 1.
ScenarioTrace BuildSynchronousGroupTrace(size_t g, size_t k);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_ADVERSARY_H_
