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

#include "pseudosync/sim.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <tuple>

#include "absl/strings/str_format.h"
#include "pseudosync/adversary.h"
#include "pseudosync/demand.h"
#include "pseudosync/errors.h"
#include "pseudosync/rng.h"

namespace pseudosync {
namespace {

constexpr double kBoundaryTolerance = 1e-6;
constexpr size_t kMaxRecordedViolations = 20;

enum class EventKind : uint8_t {
  kMigration = 0,
  kChangeExecute = 1,
  kChangeRequest = 2,
  kVtAsyncChange = 3,
  kBroadcast = 4,
  kMisbehavior = 5,
  kV2tAttempt = 6,
  kShuffle = 7,
};

struct Event {
  double time;
  EventKind kind;
  uint32_t vmu;  // VMU index, or 0 for global events
  uint64_t seq;
  uint64_t payload;

  auto key() const { return std::tie(time, kind, vmu, seq); }
  bool operator>(const Event& other) const { return key() > other.key(); }
};

struct Group {
  double t_star;
  RsuId region;
  bool synchronous;
  std::vector<uint64_t> schedules;
  std::vector<int> members;
};

absl::Status FieldError(const std::string& path, const std::string& message) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", message));
}

bool NonNegative(double v) { return v >= 0.0 && std::isfinite(v); }

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, PreparedScenario prepared,
             AllocationPlan plan, PseudonymSystem system)
      : config_(config),
        prepared_(std::move(prepared)),
        plan_(std::move(plan)),
        system_(std::move(system)),
        v2t_rng_(DeriveSeed(config.seed, "v2t")) {}

  absl::StatusOr<SimReport> Run(Chain* chain_out);

 private:
  EntityId VmuId(int i) const { return static_cast<EntityId>(2 * i); }
  EntityId VtId(int i) const { return static_cast<EntityId>(2 * i + 1); }
  int m() const { return static_cast<int>(config_.vmus.size()); }

  double Position(int i, double t) const;
  RsuId RegionOf(double x) const;
  double NextCrossing(int i) const;
  void Push(double time, EventKind kind, int vmu, uint64_t payload = 0);
  void SyncPositions(double now);
  void Violation(const std::string& message);
  void CheckAfterEvent(double now);
  void Authenticate(int i);

  void OnMigration(const Event& e);
  void OnChangeRequest(const Event& e);
  void OnChangeExecute(const Event& e);
  void OnVtAsyncChange(const Event& e);
  void OnBroadcast(const Event& e);
  void OnMisbehavior(const Event& e);
  void OnV2tAttempt(const Event& e);
  void OnShuffle(const Event& e);
  void RecordChange(int i, double t, bool vmu_changed, bool vt_changed,
                    size_t group_size, bool synchronous);

  const ScenarioConfig& config_;
  PreparedScenario prepared_;
  AllocationPlan plan_;
  PseudonymSystem system_;
  Rng v2t_rng_;
  Chain chain_;

  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  uint64_t next_seq_ = 0;
  double exec_horizon_ = 0.0;

  std::vector<RsuId> region_;
  std::vector<int64_t> crossings_;
  std::vector<int64_t> demand_;
  std::vector<int64_t> served_;
  std::vector<std::vector<size_t>> group_sizes_;
  std::vector<std::optional<SessionToken>> tokens_;
  std::vector<double> revoked_at_;
  std::map<uint64_t, Group> groups_;
  uint64_t next_group_ = 0;
  std::vector<ScenarioTrace> traces_;

  SecurityCounters security_;
  uint64_t events_ = 0;
  uint64_t checks_ = 0;
  uint64_t violation_count_ = 0;
  std::vector<std::string> violations_;
};

double Simulation::Position(int i, double t) const {
  const double length = config_.RoadLength();
  double x = std::fmod(config_.vmus[i].position + config_.vmus[i].velocity * t,
                       length);
  if (x < 0.0) x += length;
  return x;
}

RsuId Simulation::RegionOf(double x) const {
  const int cell = static_cast<int>(std::floor(x / config_.coverage));
  return static_cast<RsuId>(std::clamp(cell, 0, config_.rsu_count - 1));
}

// Time of the next segment boundary crossing for VMU i, after crossings_[i]
// crossings so far.
double Simulation::NextCrossing(int i) const {
  const VmuSpec& spec = config_.vmus[i];
  if (spec.velocity == 0.0) return INFINITY;
  const double cov = config_.coverage;
  const double cell = std::floor(spec.position / cov);
  const double k = static_cast<double>(crossings_[i]);
  const double boundary =
      spec.velocity > 0.0 ? (cell + 1.0 + k) * cov : (cell - k) * cov;
  return (boundary - spec.position) / spec.velocity;
}

void Simulation::Push(double time, EventKind kind, int vmu, uint64_t payload) {
  queue_.push(Event{time, kind, static_cast<uint32_t>(vmu), next_seq_++,
                    payload});
}

void Simulation::SyncPositions(double now) {
  for (int i = 0; i < m(); ++i) {
    const double x = Position(i, now);
    system_.SetLocation(VmuId(i), region_[i], x).IgnoreError();
    system_.SetLocation(VtId(i), region_[i], x).IgnoreError();
  }
}

void Simulation::Violation(const std::string& message) {
  ++violation_count_;
  if (violations_.size() < kMaxRecordedViolations) {
    violations_.push_back(message);
  }
}

void Simulation::CheckAfterEvent(double now) {
  if (!config_.check_invariants) return;
  ++checks_;
  if (absl::Status s = system_.CheckInvariants(); !s.ok()) {
    Violation(absl::StrFormat("t=%.9g: %s", now, std::string(s.message())));
  }
  const double cov = config_.coverage;
  for (int i = 0; i < m(); ++i) {
    const double x = Position(i, now);
    const double offset = x / cov - std::floor(x / cov);
    const bool near_boundary = std::min(offset, 1.0 - offset) * cov <
                               kBoundaryTolerance;
    const RsuId expected = RegionOf(x);
    const RsuId hosting = system_.entity(VtId(i))->region;
    if (!near_boundary && (region_[i] != expected || hosting != expected)) {
      Violation(absl::StrFormat(
          "t=%.9g: VT %d hosted on RSU %d while its VMU is in region %d", now,
          i, hosting, expected));
    }
  }
}

void Simulation::Authenticate(int i) {
  absl::StatusOr<SessionToken> token =
      system_.MutualAuthenticate(VmuId(i), VtId(i));
  if (token.ok()) {
    tokens_[i] = *token;
  } else {
    tokens_[i].reset();
  }
}

void Simulation::OnMigration(const Event& e) {
  const int i = static_cast<int>(e.vmu);
  const int step = config_.vmus[i].velocity > 0.0 ? 1 : -1;
  region_[i] = static_cast<RsuId>((static_cast<int>(region_[i]) + step +
                                   config_.rsu_count) %
                                  config_.rsu_count);
  ++crossings_[i];
  SyncPositions(e.time);
  const double next = NextCrossing(i);
  if (next <= exec_horizon_) Push(next, EventKind::kMigration, i);
}

void Simulation::OnChangeRequest(const Event& e) {
  const int i = static_cast<int>(e.vmu);
  ++demand_[i];
  const EntityState* vmu = system_.entity(VmuId(i));
  if (vmu->available() == 0) return;  // allocation spent: shortage
  const bool synchronous = config_.mode == SyncMode::kSynchronous &&
                           !system_.IsBlacklisted(VtId(i));
  Group* join = nullptr;
  for (auto& [id, group] : groups_) {
    if (group.t_star > e.time && group.region == region_[i] &&
        group.synchronous == synchronous &&
        std::find(group.members.begin(), group.members.end(), i) ==
            group.members.end()) {
      join = &group;
      break;
    }
  }
  absl::StatusOr<ChangeSchedule> schedule =
      join != nullptr
          ? system_.ScheduleChangeAt(VmuId(i), e.time, join->t_star,
                                     synchronous)
          : system_.ScheduleChange(VmuId(i), e.time, synchronous);
  if (!schedule.ok()) return;  // no VT pseudonym available: shortage
  ++served_[i];
  if (join != nullptr) {
    join->schedules.push_back(schedule->id);
    join->members.push_back(i);
    return;
  }
  const uint64_t id = next_group_++;
  groups_[id] = Group{schedule->t_star, region_[i], synchronous,
                      {schedule->id}, {i}};
  Push(schedule->t_star, EventKind::kChangeExecute, i, id);
}

void Simulation::RecordChange(int i, double t, bool vmu_changed,
                              bool vt_changed, size_t group_size,
                              bool synchronous) {
  ChangeEvent change;
  change.time = t;
  change.vmu_changed = vmu_changed;
  change.vt_changed = vt_changed;
  change.group_size = group_size;
  change.synchronous = synchronous;
  change.region = region_[i];
  change.new_vmu_pid = *system_.entity(VmuId(i))->active;
  change.new_vt_pid = *system_.entity(VtId(i))->active;
  traces_[i].changes.push_back(change);
}

void Simulation::OnChangeExecute(const Event& e) {
  auto it = groups_.find(e.payload);
  if (it == groups_.end()) return;
  const Group group = it->second;
  groups_.erase(it);
  SyncPositions(e.time);
  // Members may have crossed into other segments since they joined.
  std::map<RsuId, std::vector<size_t>> by_region;
  for (size_t k = 0; k < group.members.size(); ++k) {
    by_region[region_[group.members[k]]].push_back(k);
  }
  for (const auto& [region, positions] : by_region) {
    std::vector<uint64_t> ids;
    for (size_t k : positions) ids.push_back(group.schedules[k]);
    std::vector<std::vector<size_t>> batches;
    if (system_.ExecuteGroupChange(ids, e.time).ok()) {
      batches.push_back(positions);
    } else {
      for (size_t k : positions) {
        if (system_.ExecuteChange(group.schedules[k], e.time).ok()) {
          batches.push_back({k});
        } else {
          Violation(absl::StrFormat("t=%.9g: schedule %d failed to execute",
                                    e.time, group.schedules[k]));
        }
      }
    }
    for (const std::vector<size_t>& batch : batches) {
      for (size_t k : batch) {
        const int i = group.members[k];
        const bool vt_changed =
            group.synchronous && !system_.IsBlacklisted(VtId(i));
        group_sizes_[i].push_back(batch.size());
        RecordChange(i, e.time, true, vt_changed, batch.size(),
                     group.synchronous);
        if (!system_.IsBlacklisted(VtId(i))) Authenticate(i);
      }
    }
  }
}

void Simulation::OnVtAsyncChange(const Event& e) {
  const int i = static_cast<int>(e.vmu);
  const EntityId vt = VtId(i);
  if (system_.IsBlacklisted(vt)) return;
  const EntityState* state = system_.entity(vt);
  if (state->available() == 0) {
    if (!system_
             .RequestPseudonymSet(vt, config_.vt_set_size, state->region,
                                  e.time)
             .ok()) {
      return;
    }
  }
  const EntityId members[] = {vt};
  if (!system_.GroupChange(members, EntityKind::kVt, e.time).ok()) return;
  RecordChange(i, e.time, false, true, 1, false);
  Authenticate(i);
}

void Simulation::OnBroadcast(const Event& e) {
  for (int i = 0; i < m(); ++i) {
    const VmuSpec& spec = config_.vmus[i];
    const int heading = (spec.velocity > 0.0) - (spec.velocity < 0.0);
    const EntityState* vmu = system_.entity(VmuId(i));
    const EntityState* vt = system_.entity(VtId(i));
    traces_[i].observations.push_back(Observation{
        e.time, Layer::kPhysical, *vmu->active, vmu->region, spec.velocity,
        heading});
    traces_[i].observations.push_back(Observation{
        e.time, Layer::kVirtual, *vt->active, vt->region, spec.velocity,
        heading});
    if (system_.IsBlacklisted(VtId(i))) {
      ++security_.t2t_attempts;
      absl::StatusOr<SessionToken> token =
          system_.MutualAuthenticate(VmuId(i), VtId(i));
      if (token.ok()) {
        ++security_.t2t_accepted;
      } else if (config_.enforce_blacklist &&
                 GetErrorKind(token.status()) !=
                     ErrorKind::kRevokedCounterpart) {
        Violation(absl::StrFormat(
            "t=%.9g: revoked VT %d was not refused as revoked", e.time, i));
      }
      continue;
    }
    if (!tokens_[i].has_value() ||
        !system_.AcceptSensingData(VtId(i), *tokens_[i]).ok()) {
      Violation(absl::StrFormat("t=%.9g: twin %d lost its session", e.time, i));
    }
  }
}

void Simulation::OnMisbehavior(const Event& e) {
  const int rogue = static_cast<int>(e.vmu);
  int reporter = -1;
  for (int i = 0; i < m(); ++i) {
    if (i != rogue && !system_.IsBlacklisted(VtId(i)) &&
        std::find(config_.rogue_vts.begin(), config_.rogue_vts.end(), i) ==
            config_.rogue_vts.end()) {
      reporter = i;
      break;
    }
  }
  if (reporter < 0) return;
  const MisbehaviorEvidence evidence{
      VtId(reporter), *system_.entity(VtId(rogue))->active, e.time};
  absl::StatusOr<ReportOutcome> outcome =
      system_.ReportMalicious(evidence, e.time);
  if (!outcome.ok()) {
    ++security_.reports_rejected;
    return;
  }
  ++security_.reports_filed;
  if (outcome->newly_added) {
    ++security_.blacklisted;
    revoked_at_[rogue] = e.time;
    tokens_[rogue].reset();
  }
}

void Simulation::OnV2tAttempt(const Event& e) {
  for (int i = 0; i < m(); ++i) {
    if (system_.IsBlacklisted(VtId(i))) continue;
    ++security_.v2t_attempts;
    const SessionToken forged{v2t_rng_.NextU64(), v2t_rng_.NextU64()};
    if (system_.AcceptSensingData(VtId(i), forged).ok()) {
      ++security_.v2t_accepted;
    }
  }
  (void)e;
}

void Simulation::OnShuffle(const Event& e) {
  std::map<std::pair<RsuId, EntityKind>, std::vector<PseudonymId>> batches;
  for (const EntityState& state : system_.entities()) {
    for (const PseudonymId& pid : state.used) {
      if (system_.record(pid)->revoked) continue;
      batches[{state.region, state.kind}].push_back(pid);
    }
  }
  for (const auto& [key, ids] : batches) {
    absl::StatusOr<ShuffleTransaction> txn =
        system_.ReturnAndShuffle(key.first, key.second, ids, e.time);
    if (!txn.ok()) {
      Violation(absl::StrFormat("t=%.9g: shuffle failed: %s", e.time,
                                std::string(txn.status().message())));
      continue;
    }
    if (txn->commitments.empty()) continue;
    if (absl::Status s = chain_.Append(*std::move(txn)); !s.ok()) {
      Violation(absl::StrFormat("t=%.9g: ledger append failed: %s", e.time,
                                std::string(s.message())));
    }
  }
}

absl::StatusOr<SimReport> Simulation::Run(Chain* chain_out) {
  const int n = m();
  const double period = config_.period;
  exec_horizon_ = period + config_.delta_sync;
  region_.resize(n);
  crossings_.assign(n, 0);
  demand_.assign(n, 0);
  served_.assign(n, 0);
  group_sizes_.assign(n, {});
  tokens_.assign(n, std::nullopt);
  revoked_at_.assign(n, INFINITY);
  traces_.assign(n, ScenarioTrace{});

  for (int i = 0; i < n; ++i) {
    region_[i] = RegionOf(Position(i, 0.0));
    const EntityId vmu = system_.AddEntity(EntityKind::kVmu, region_[i],
                                           Position(i, 0.0));
    const EntityId vt = system_.AddEntity(EntityKind::kVt, region_[i],
                                          Position(i, 0.0));
    if (absl::Status s = system_.LinkTwins(vmu, vt); !s.ok()) return s;
  }
  for (int rsu = 0; rsu < config_.rsu_count; ++rsu) {
    if (absl::Status s = system_.Provision(
            static_cast<RsuId>(rsu), EntityKind::kVt,
            static_cast<uint64_t>(config_.vt_initial_stock), 0.0);
        !s.ok()) {
      return s;
    }
  }
  for (int i = 0; i < n; ++i) {
    const uint64_t count = static_cast<uint64_t>(plan_.r[i]) + 1;
    if (absl::Status s =
            system_.Provision(region_[i], EntityKind::kVmu, count, 0.0);
        !s.ok()) {
      return s;
    }
    if (auto s = system_.RequestPseudonymSet(VmuId(i), count, region_[i], 0.0);
        !s.ok()) {
      return s.status();
    }
    if (auto s = system_.RequestPseudonymSet(
            VtId(i), static_cast<uint64_t>(config_.vt_set_size), region_[i],
            0.0);
        !s.ok()) {
      return s.status();
    }
    Authenticate(i);
    traces_[i].horizon = period;
    traces_[i].initial_vmu_pid = *system_.entity(VmuId(i))->active;
    traces_[i].initial_vt_pid = *system_.entity(VtId(i))->active;
    traces_[i].initial_region = region_[i];
  }

  for (int i = 0; i < n; ++i) {
    const VmuSpec& spec = config_.vmus[i];
    Rng arrivals(DeriveSeed(config_.seed, "arrivals", i));
    for (double t : SampleArrivalTimes(DemandModel{spec.frequency, period},
                                       arrivals)) {
      Push(t, EventKind::kChangeRequest, i);
    }
    const double crossing = NextCrossing(i);
    if (crossing <= exec_horizon_) Push(crossing, EventKind::kMigration, i);
    if (config_.mode == SyncMode::kAsynchronous && spec.frequency > 0.0) {
      const double step = 1.0 / (config_.async_ratio * spec.frequency);
      for (double t = 0.5 * step; t < period; t += step) {
        Push(t, EventKind::kVtAsyncChange, i);
      }
    }
  }
  for (double t = 0.0; t < period; t += config_.broadcast_interval) {
    Push(t, EventKind::kBroadcast, 0);
    Push(t + 0.5 * config_.broadcast_interval, EventKind::kV2tAttempt, 0);
  }
  for (int rogue : config_.rogue_vts) {
    Push(config_.misbehavior_time, EventKind::kMisbehavior, rogue);
  }
  for (double t = config_.shuffle_interval; t < period;
       t += config_.shuffle_interval) {
    Push(t, EventKind::kShuffle, 0);
  }

  CheckAfterEvent(0.0);
  while (!queue_.empty()) {
    const Event e = queue_.top();
    queue_.pop();
    const bool late = e.kind == EventKind::kMigration ||
                      e.kind == EventKind::kChangeExecute;
    if (e.time > (late ? exec_horizon_ : period)) continue;
    system_.CreditRestock(e.time);
    switch (e.kind) {
      case EventKind::kMigration:
        OnMigration(e);
        break;
      case EventKind::kChangeExecute:
        OnChangeExecute(e);
        break;
      case EventKind::kChangeRequest:
        OnChangeRequest(e);
        break;
      case EventKind::kVtAsyncChange:
        OnVtAsyncChange(e);
        break;
      case EventKind::kBroadcast:
        OnBroadcast(e);
        break;
      case EventKind::kMisbehavior:
        OnMisbehavior(e);
        break;
      case EventKind::kV2tAttempt:
        OnV2tAttempt(e);
        break;
      case EventKind::kShuffle:
        OnShuffle(e);
        break;
    }
    ++events_;
    CheckAfterEvent(e.time);
  }

  SimReport report;
  report.config = config_;
  report.rng_algorithm = kRngAlgorithm;
  report.hash_function = kHashFunctionName;
  report.budget = prepared_.problem.budget;
  report.allocated_total = plan_.Total();
  for (int i = 0; i < n; ++i) {
    const VmuDemand& vmu = prepared_.problem.vmus[i];
    const EntityState* state = system_.entity(VmuId(i));
    VmuResult result;
    result.index = i;
    result.frequency = config_.vmus[i].frequency;
    result.p = prepared_.entropy[i].p;
    result.avg_entropy = vmu.utility.avg_entropy;
    result.allocation = plan_.r[i];
    result.demand = demand_[i];
    result.served = served_[i];
    result.shortage = demand_[i] - served_[i];
    result.leftover = plan_.r[i] - served_[i];
    result.realized_utility =
        vmu.utility.UnitProfit() * static_cast<double>(result.served) -
        vmu.utility.h_store * static_cast<double>(result.leftover) -
        vmu.utility.r_penalty * static_cast<double>(result.shortage);
    result.expected_utility =
        ExpectedUtility(plan_.r[i], vmu.demand, vmu.utility);
    result.change_epochs = state->change_epochs;
    result.group_sizes = group_sizes_[i];
    absl::StatusOr<EntropyTimeline> timeline = BuildTimeline(
        prepared_.entropy[i], state->change_epochs, exec_horizon_);
    if (timeline.ok()) {
      result.timeline = timeline->Flatten();
    } else {
      Violation(absl::StrFormat("VMU %d timeline: %s", i,
                                std::string(timeline.status().message())));
    }
    if (result.change_epochs.size() != static_cast<size_t>(result.served)) {
      Violation(absl::StrFormat("VMU %d served %d changes but reset %d times",
                                i, result.served, result.change_epochs.size()));
    }
    if (config_.mode == SyncMode::kSynchronous) {
      std::vector<double> vmu_epochs;
      for (double t : state->change_epochs) {
        if (t < revoked_at_[i]) vmu_epochs.push_back(t);
      }
      if (vmu_epochs != system_.entity(VtId(i))->change_epochs) {
        Violation(absl::StrFormat("pair %d changed out of sync", i));
      }
    }
    report.total_realized_utility += result.realized_utility;
    report.total_expected_utility += result.expected_utility;
    report.vmus.push_back(std::move(result));
  }
  report.mean_realized_utility = report.total_realized_utility / n;
  report.mean_expected_utility = report.total_expected_utility / n;

  for (size_t a = 0; a < config_.attackers.size(); ++a) {
    const AttackerSpec& spec = config_.attackers[a];
    AttackerConfig attacker;
    attacker.observability.physical = spec.physical;
    attacker.observability.virtual_layer = spec.virtual_layer;
    attacker.observability.masked_regions = std::set<RsuId>(
        spec.masked_regions.begin(), spec.masked_regions.end());
    AttackerResult result;
    result.name = spec.name;
    for (int i = 0; i < n; ++i) {
      ScenarioTrace trace = traces_[i];
      std::erase_if(trace.changes, [period](const ChangeEvent& c) {
        return c.time >= period;
      });
      attacker.seed = DeriveSeed(config_.seed, "attacker:" + spec.name, i);
      const double fraction =
          TrackingFraction(trace, attacker).tracked_fraction;
      result.tracked_fraction.push_back(fraction);
      result.mean_tracked_fraction += fraction / n;
    }
    report.attackers.push_back(std::move(result));
  }

  report.security = security_;
  for (size_t k = 0; k < chain_.size(); ++k) {
    const Block& block = chain_.blocks()[k];
    report.ledger.push_back(LedgerEntry{k, block.transaction.epoch,
                                        DigestHex(block.block_hash)});
  }
  report.ledger_head = DigestHex(chain_.head_hash());
  report.ca_log = system_.ca_log();
  report.events_processed = events_;
  report.invariant_checks = checks_;
  report.invariant_violations = violations_;
  if (violation_count_ > violations_.size()) {
    report.invariant_violations.push_back(absl::StrFormat(
        "%d further violations omitted", violation_count_ - violations_.size()));
  }
  if (chain_out != nullptr) *chain_out = chain_;
  return report;
}

}  // namespace

std::string_view SyncModeName(SyncMode mode) {
  return mode == SyncMode::kSynchronous ? "sync" : "async";
}

std::string_view AllocationSchemeName(AllocationScheme scheme) {
  return scheme == AllocationScheme::kOnDemand ? "on_demand" : "equal";
}

std::string_view SolverName(Solver solver) {
  return solver == Solver::kGa ? "ga" : "exact";
}

absl::StatusOr<SyncMode> ParseSyncMode(std::string_view text) {
  if (text == "sync") return SyncMode::kSynchronous;
  if (text == "async") return SyncMode::kAsynchronous;
  return absl::InvalidArgumentError(
      absl::StrCat("mode must be sync or async, got '", std::string(text), "'"));
}

absl::StatusOr<AllocationScheme> ParseAllocationScheme(std::string_view text) {
  if (text == "on_demand") return AllocationScheme::kOnDemand;
  if (text == "equal") return AllocationScheme::kEqual;
  return absl::InvalidArgumentError(absl::StrCat(
      "scheme must be on_demand or equal, got '", std::string(text), "'"));
}

absl::StatusOr<Solver> ParseSolver(std::string_view text) {
  if (text == "ga") return Solver::kGa;
  if (text == "exact") return Solver::kExact;
  return absl::InvalidArgumentError(
      absl::StrCat("solver must be ga or exact, got '", std::string(text), "'"));
}

std::vector<AttackerSpec> DefaultAttackers() {
  return {AttackerSpec{"global", true, true, {}},
          AttackerSpec{"roadside", true, false, {}},
          AttackerSpec{"vsp", false, true, {}}};
}

absl::Status ScenarioConfig::Validate() const {
  if (rsu_count < 1) return FieldError("rsu_count", "must be at least 1");
  if (!(coverage > 0.0) || !std::isfinite(coverage)) {
    return FieldError("coverage", "must be positive");
  }
  if (vmus.empty()) return FieldError("vmus", "at least one VMU is required");
  for (size_t i = 0; i < vmus.size(); ++i) {
    const std::string path = absl::StrFormat("vmus[%d]", i);
    const VmuSpec& v = vmus[i];
    if (!NonNegative(v.frequency)) {
      return FieldError(path + ".frequency", "must be non-negative");
    }
    if (!std::isfinite(v.velocity)) {
      return FieldError(path + ".velocity", "must be finite");
    }
    if (!std::isfinite(v.position) || v.position < 0.0 ||
        v.position >= RoadLength()) {
      return FieldError(path + ".position",
                        absl::StrFormat("must lie in [0, %g)", RoadLength()));
    }
    if (v.p.has_value() && !(*v.p > 0.0 && *v.p <= 1.0)) {
      return FieldError(path + ".p", "must lie in (0, 1]");
    }
  }
  if (!NonNegative(theta)) return FieldError("theta", "must be non-negative");
  if (!(period > 0.0) || !std::isfinite(period)) {
    return FieldError("period", "must be positive");
  }
  if (!NonNegative(beta)) return FieldError("beta", "must be non-negative");
  if (!NonNegative(h_store)) return FieldError("h", "must be non-negative");
  if (!NonNegative(r_penalty)) return FieldError("r", "must be non-negative");
  if (!NonNegative(h_min)) return FieldError("h_min", "must be non-negative");
  if (!NonNegative(alpha)) return FieldError("alpha", "must be non-negative");
  if (!std::isfinite(h_max) || !std::isfinite(h_0)) {
    return FieldError("h_max", "entropy bounds must be finite");
  }
  if (!(delta_sync > 0.0) || !std::isfinite(delta_sync)) {
    return FieldError("delta_sync", "must be positive");
  }
  if (vmu_set_size < 1) return FieldError("vmu_set_size", "must be at least 1");
  if (vt_set_size < 1) return FieldError("vt_set_size", "must be at least 1");
  if (!(async_ratio > 0.0) || !std::isfinite(async_ratio)) {
    return FieldError("async_ratio", "must be positive");
  }
  if (!NonNegative(hotspot_radius)) {
    return FieldError("hotspot_radius", "must be non-negative");
  }
  if (vt_initial_stock < 0) {
    return FieldError("vt_initial_stock", "must be non-negative");
  }
  if (!(broadcast_interval > 0.0) || !std::isfinite(broadcast_interval)) {
    return FieldError("broadcast_interval", "must be positive");
  }
  if (!(shuffle_interval > 0.0) || !std::isfinite(shuffle_interval)) {
    return FieldError("shuffle_interval", "must be positive");
  }
  std::set<int> rogues;
  for (size_t k = 0; k < rogue_vts.size(); ++k) {
    if (rogue_vts[k] < 0 || rogue_vts[k] >= static_cast<int>(vmus.size()) ||
        !rogues.insert(rogue_vts[k]).second) {
      return FieldError(absl::StrFormat("rogue_vts[%d]", k),
                        "must be a distinct VMU index");
    }
  }
  if (!NonNegative(misbehavior_time)) {
    return FieldError("misbehavior_time", "must be non-negative");
  }
  if (absl::Status s = ga.Validate(); !s.ok()) {
    return FieldError("ga", std::string(s.message()));
  }
  std::set<std::string> names;
  for (size_t k = 0; k < attackers.size(); ++k) {
    const std::string path = absl::StrFormat("attackers[%d]", k);
    if (attackers[k].name.empty() || !names.insert(attackers[k].name).second) {
      return FieldError(path + ".name", "must be non-empty and unique");
    }
    for (RsuId region : attackers[k].masked_regions) {
      if (region >= static_cast<RsuId>(rsu_count)) {
        return FieldError(path + ".masked_regions", "unknown RSU");
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<PreparedScenario> Prepare(const ScenarioConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  PreparedScenario prepared;
  std::vector<VmuDemand> vmus;
  for (size_t i = 0; i < config.vmus.size(); ++i) {
    const VmuSpec& spec = config.vmus[i];
    double p = 0.0;
    if (spec.p.has_value()) {
      p = *spec.p;
    } else {
      Rng rng(DeriveSeed(config.seed, "entropy_p", i));
      p = 0.5 * rng.UniformOpenLow();
    }
    const EntropyParams entropy{config.h_max, config.h_0, config.h_min,
                                config.alpha, p};
    if (absl::Status s = entropy.Validate(); !s.ok()) {
      return FieldError(absl::StrFormat("vmus[%d].p", i),
                        std::string(s.message()));
    }
    const double tau = spec.frequency > 0.0 ? 1.0 / spec.frequency : INFINITY;
    absl::StatusOr<double> avg = AverageEntropy(entropy, tau);
    if (!avg.ok()) return avg.status();
    VmuDemand vmu;
    vmu.demand = DemandModel{spec.frequency, config.period};
    vmu.utility.beta = config.beta;
    vmu.utility.h_store = config.h_store;
    vmu.utility.r_penalty = config.r_penalty;
    vmu.utility.avg_entropy = *avg;
    prepared.entropy.push_back(entropy);
    vmus.push_back(vmu);
  }
  absl::StatusOr<AllocationProblem> problem = AllocationProblem::Create(
      std::move(vmus), BudgetFromRate(config.theta, config.period));
  if (!problem.ok()) return problem.status();
  prepared.problem = *std::move(problem);
  return prepared;
}

absl::StatusOr<AllocationPlan> ChooseAllocation(
    const ScenarioConfig& config, const AllocationProblem& problem) {
  if (config.scheme == AllocationScheme::kEqual) {
    return EqualAllocation(problem);
  }
  if (config.solver == Solver::kExact) return OptimizeExact(problem);
  return OptimizeGa(problem, config.ga, DeriveSeed(config.seed, "ga"));
}

absl::StatusOr<SimReport> RunScenario(const ScenarioConfig& config, Chain* chain) {
  absl::StatusOr<PreparedScenario> prepared = Prepare(config);
  if (!prepared.ok()) return prepared.status();
  absl::StatusOr<AllocationPlan> plan =
      ChooseAllocation(config, prepared->problem);
  if (!plan.ok()) return plan.status();

  ProtocolConfig protocol;
  protocol.delta_sync = config.delta_sync;
  protocol.vmu_set_size = config.vmu_set_size;
  protocol.vt_set_size = config.vt_set_size;
  protocol.hotspot_radius = config.hotspot_radius;
  protocol.road_length = config.RoadLength();
  protocol.theta = config.theta;
  protocol.rsu_count = config.rsu_count;
  protocol.require_session_token = config.require_session_token;
  protocol.enforce_blacklist = config.enforce_blacklist;
  protocol.seed = DeriveSeed(config.seed, "protocol-system");
  absl::StatusOr<PseudonymSystem> system = PseudonymSystem::Create(protocol);
  if (!system.ok()) return system.status();

  Simulation simulation(config, *std::move(prepared), *std::move(plan),
                        *std::move(system));
  return simulation.Run(chain);
}

}  // namespace pseudosync
