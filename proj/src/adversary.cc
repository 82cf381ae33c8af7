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

#include "pseudosync/adversary.h"

#include <algorithm>
#include <cmath>

#include "pseudosync/rng.h"

namespace pseudosync {
namespace {

bool Consistent(const Observation& a, const Observation& b) {
  return a.region == b.region && std::abs(a.time - b.time) <= kLinkWindow &&
         std::abs(a.velocity - b.velocity) <= 1e-9 && a.heading == b.heading;
}

PseudonymId TracePid(uint64_t layer, uint64_t index) {
  return PseudonymId{layer, index};
}

}  // namespace

bool Observability::Sees(Layer layer, RsuId region) const {
  if (masked_regions.count(region)) return false;
  return layer == Layer::kPhysical ? physical : virtual_layer;
}

AttackerBelief Observe(AttackerBelief belief, const Observation& obs,
                       const Observability& observability) {
  if (!observability.Sees(obs.layer, obs.region)) return belief;
  if (obs.layer == Layer::kPhysical) {
    if (belief.last_virtual && Consistent(*belief.last_virtual, obs)) {
      belief.links[obs.pid].insert(belief.last_virtual->pid);
    }
    belief.last_physical = obs;
  } else {
    if (belief.last_physical && Consistent(*belief.last_physical, obs)) {
      belief.links[belief.last_physical->pid].insert(obs.pid);
    }
    belief.last_virtual = obs;
  }
  return belief;
}

double ReidentifyProbability(const AttackerBelief& belief,
                             const ChangeEvent& change,
                             const Observability& observability) {
  if (!belief.tracking) return 0.0;
  const bool sees_vmu = observability.Sees(Layer::kPhysical, change.region);
  const bool sees_vt = observability.Sees(Layer::kVirtual, change.region);
  const bool any_change = change.vmu_changed || change.vt_changed;
  if (!sees_vmu && !sees_vt) return any_change ? 0.0 : 1.0;
  if ((sees_vmu && !change.vmu_changed) || (sees_vt && !change.vt_changed)) {
    return 1.0;
  }
  return 1.0 / static_cast<double>(std::max<size_t>(change.group_size, 1));
}

BoundaryOutcome BoundaryReidentify(const AttackerBelief& belief,
                                   const ChangeEvent& change,
                                   const Observability& observability,
                                   uint64_t seed, uint64_t boundary_index) {
  BoundaryOutcome outcome;
  outcome.time = change.time;
  outcome.probability = ReidentifyProbability(belief, change, observability);
  outcome.candidates =
      outcome.probability < 1.0 ? std::max<size_t>(change.group_size, 1) : 1;
  Rng rng(DeriveSeed(seed, "boundary", boundary_index));
  outcome.reidentified = rng.Uniform() < outcome.probability;
  return outcome;
}

TrackRecord TrackingFraction(const ScenarioTrace& trace,
                             const AttackerConfig& attacker) {
  const Observability& view = attacker.observability;
  AttackerBelief belief;
  belief.tracking = view.physical || view.virtual_layer;
  belief.vmu_pid = trace.initial_vmu_pid;
  belief.vt_pid = trace.initial_vt_pid;

  TrackRecord record;
  record.horizon = trace.horizon;
  double lost_at = belief.tracking ? trace.horizon : 0.0;
  size_t next_obs = 0;
  auto observe_until = [&](double t, bool inclusive) {
    while (next_obs < trace.observations.size() &&
           (inclusive ? trace.observations[next_obs].time <= t
                      : trace.observations[next_obs].time < t)) {
      belief = Observe(std::move(belief), trace.observations[next_obs], view);
      ++next_obs;
    }
  };
  for (size_t j = 0; j < trace.changes.size(); ++j) {
    const ChangeEvent& change = trace.changes[j];
    observe_until(change.time, false);
    const bool was_tracking = belief.tracking;
    const BoundaryOutcome outcome =
        BoundaryReidentify(belief, change, view, attacker.seed, j);
    record.boundaries.push_back(outcome);
    belief.candidate_counts.push_back(outcome.candidates);
    if (!was_tracking) continue;
    if (outcome.reidentified) {
      if (change.vmu_changed) belief.vmu_pid = change.new_vmu_pid;
      if (change.vt_changed) belief.vt_pid = change.new_vt_pid;
    } else {
      belief.tracking = false;
      lost_at = std::min(change.time, trace.horizon);
    }
  }
  observe_until(trace.horizon, true);
  if (lost_at > 0.0) record.tracked_intervals.push_back({0.0, lost_at});
  record.tracked_fraction =
      trace.horizon > 0.0 ? std::clamp(lost_at / trace.horizon, 0.0, 1.0) : 0.0;
  record.links = belief.links;
  return record;
}

ScenarioTrace BuildCadenceTrace(const CadenceScenario& scenario) {
  ScenarioTrace trace;
  trace.horizon = scenario.horizon;
  const double vmu_period = scenario.ratio * scenario.vt_period;
  uint64_t vmu_index = 1;
  uint64_t vt_index = 1;
  trace.initial_vmu_pid = TracePid(0, vmu_index);
  trace.initial_vt_pid = TracePid(1, vt_index);

  std::vector<double> vmu_times;
  for (int k = 1; k * vmu_period < scenario.horizon; ++k) {
    vmu_times.push_back(k * vmu_period);
  }
  std::vector<double> vt_times;
  if (scenario.synchronous) {
    vt_times = vmu_times;
  } else {
    for (int k = 0; scenario.vt_offset + k * scenario.vt_period <
                    scenario.horizon;
         ++k) {
      vt_times.push_back(scenario.vt_offset + k * scenario.vt_period);
    }
  }
  size_t i = 0;
  size_t j = 0;
  while (i < vmu_times.size() || j < vt_times.size()) {
    const double t = std::min(i < vmu_times.size() ? vmu_times[i] : INFINITY,
                              j < vt_times.size() ? vt_times[j] : INFINITY);
    ChangeEvent change;
    change.time = t;
    change.synchronous = scenario.synchronous;
    if (i < vmu_times.size() && vmu_times[i] == t) {
      change.vmu_changed = true;
      change.new_vmu_pid = TracePid(0, ++vmu_index);
      change.group_size = scenario.group_size;
      ++i;
    }
    if (j < vt_times.size() && vt_times[j] == t) {
      change.vt_changed = true;
      change.new_vt_pid = TracePid(1, ++vt_index);
      ++j;
    }
    trace.changes.push_back(change);
  }

  PseudonymId vmu = trace.initial_vmu_pid;
  PseudonymId vt = trace.initial_vt_pid;
  size_t c = 0;
  const double step = scenario.observation_step;
  for (int k = 0; k * step <= scenario.horizon; ++k) {
    const double t = k * step;
    while (c < trace.changes.size() && trace.changes[c].time <= t) {
      if (trace.changes[c].vmu_changed) vmu = trace.changes[c].new_vmu_pid;
      if (trace.changes[c].vt_changed) vt = trace.changes[c].new_vt_pid;
      ++c;
    }
    trace.observations.push_back({t, Layer::kPhysical, vmu, 0, 1.0, 0});
    trace.observations.push_back({t, Layer::kVirtual, vt, 0, 1.0, 0});
  }
  return trace;
}

ScenarioTrace BuildSynchronousGroupTrace(size_t g, size_t k) {
  CadenceScenario scenario;
  scenario.vt_period = 1.0;
  scenario.ratio = 1.0;
  scenario.horizon = static_cast<double>(k) + 1.0;
  scenario.group_size = g;
  scenario.synchronous = true;
  scenario.observation_step = 0.5;
  return BuildCadenceTrace(scenario);
}

}  // namespace pseudosync
