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

#include "pseudosync/protocol.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "absl/strings/str_format.h"
#include "pseudosync/errors.h"

namespace pseudosync {
namespace {

constexpr double kOpenEnd = std::numeric_limits<double>::infinity();

std::array<uint8_t, 8> U64Bytes(uint64_t v) {
  std::array<uint8_t, 8> out;
  for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(v >> (56 - 8 * i));
  return out;
}

Digest Commit(const PseudonymId& id, uint64_t seed) {
  std::vector<uint8_t> buffer;
  const std::array<uint8_t, 16> id_bytes = id.Bytes();
  const std::array<uint8_t, 8> seed_bytes = U64Bytes(seed);
  buffer.insert(buffer.end(), id_bytes.begin(), id_bytes.end());
  buffer.insert(buffer.end(), seed_bytes.begin(), seed_bytes.end());
  return Sha256(buffer);
}

Digest CommitSeed(uint64_t seed) {
  static constexpr char kTag[] = "pseudosync/shuffle-seed";
  std::vector<uint8_t> buffer(kTag, kTag + sizeof(kTag) - 1);
  const std::array<uint8_t, 8> seed_bytes = U64Bytes(seed);
  buffer.insert(buffer.end(), seed_bytes.begin(), seed_bytes.end());
  return Sha256(buffer);
}

absl::Status UnknownEntity(EntityId id) {
  return MakeError(ErrorKind::kUnknownEntity,
                   absl::StrFormat("no entity with id %d", id));
}

}  // namespace

std::string_view PseudonymStatusName(PseudonymStatus status) {
  switch (status) {
    case PseudonymStatus::kPooled:
      return "pooled";
    case PseudonymStatus::kIssued:
      return "issued";
    case PseudonymStatus::kActive:
      return "active";
    case PseudonymStatus::kUsed:
      return "used";
    case PseudonymStatus::kReturned:
      return "returned";
  }
  return "unknown";
}

std::string_view CaRecordTypeName(CaRecordType type) {
  switch (type) {
    case CaRecordType::kSetRequest:
      return "set_request";
    case CaRecordType::kChangeRequest:
      return "change_request";
    case CaRecordType::kChange:
      return "change";
    case CaRecordType::kRestock:
      return "restock";
    case CaRecordType::kRevocation:
      return "revocation";
    case CaRecordType::kReturn:
      return "return";
  }
  return "unknown";
}

absl::Status ProtocolConfig::Validate() const {
  if (!(delta_sync > 0.0) || !std::isfinite(delta_sync)) {
    return absl::InvalidArgumentError("delta_sync must be positive");
  }
  if (vmu_set_size < 1 || vt_set_size < 1) {
    return absl::InvalidArgumentError("set sizes must be at least 1");
  }
  if (!(hotspot_radius >= 0.0)) {
    return absl::InvalidArgumentError("hotspot_radius must be non-negative");
  }
  if (!(road_length >= 0.0) || !std::isfinite(road_length)) {
    return absl::InvalidArgumentError("road_length must be non-negative");
  }
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    return absl::InvalidArgumentError("theta must be non-negative");
  }
  if (rsu_count < 1) {
    return absl::InvalidArgumentError("rsu_count must be at least 1");
  }
  return absl::OkStatus();
}

PseudonymSystem::PseudonymSystem(const ProtocolConfig& config)
    : config_(config), rng_(DeriveSeed(config.seed, "protocol")) {}

absl::StatusOr<PseudonymSystem> PseudonymSystem::Create(
    const ProtocolConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  return PseudonymSystem(config);
}

EntityId PseudonymSystem::AddEntity(EntityKind kind, RsuId region,
                                    double position) {
  EntityState state;
  state.id = static_cast<EntityId>(entities_.size());
  state.kind = kind;
  state.region = region;
  state.position = position;
  entities_.push_back(std::move(state));
  return entities_.back().id;
}

absl::Status PseudonymSystem::LinkTwins(EntityId vmu, EntityId vt) {
  EntityState* a = mutable_entity(vmu);
  EntityState* b = mutable_entity(vt);
  if (a == nullptr) return UnknownEntity(vmu);
  if (b == nullptr) return UnknownEntity(vt);
  if (a->kind != EntityKind::kVmu || b->kind != EntityKind::kVt) {
    return MakeError(ErrorKind::kMixedKinds, "twins pair one VMU with one VT");
  }
  a->twin = vt;
  b->twin = vmu;
  return absl::OkStatus();
}

absl::Status PseudonymSystem::SetLocation(EntityId id, RsuId region,
                                          double position) {
  EntityState* e = mutable_entity(id);
  if (e == nullptr) return UnknownEntity(id);
  if (region >= static_cast<RsuId>(config_.rsu_count)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("region %d outside [0, %d)", region, config_.rsu_count));
  }
  e->region = region;
  e->position = position;
  return absl::OkStatus();
}

EntityState* PseudonymSystem::mutable_entity(EntityId id) {
  return id < entities_.size() ? &entities_[id] : nullptr;
}

const EntityState* PseudonymSystem::entity(EntityId id) const {
  return id < entities_.size() ? &entities_[id] : nullptr;
}

const PseudonymRecord* PseudonymSystem::record(const PseudonymId& id) const {
  auto it = registry_.find(id);
  return it == registry_.end() ? nullptr : &it->second;
}

std::deque<PseudonymId>& PseudonymSystem::pool(RsuId rsu, EntityKind kind) {
  return pools_[{rsu, kind}];
}

size_t PseudonymSystem::PoolSize(RsuId rsu, EntityKind kind) const {
  auto it = pools_.find({rsu, kind});
  return it == pools_.end() ? 0 : it->second.size();
}

std::vector<PseudonymId> PseudonymSystem::PoolContents(RsuId rsu,
                                                       EntityKind kind) const {
  auto it = pools_.find({rsu, kind});
  if (it == pools_.end()) return {};
  return std::vector<PseudonymId>(it->second.begin(), it->second.end());
}

uint64_t PseudonymSystem::CountWithStatus(PseudonymStatus status) const {
  auto it = status_counts_.find(status);
  return it == status_counts_.end() ? 0 : it->second;
}

void PseudonymSystem::Log(double t, EntityId entity, RsuId rsu,
                          CaRecordType type, uint64_t count) {
  ca_log_.push_back(CaLogRecord{ca_log_.size(), t, entity, rsu, type, count});
}

PseudonymId PseudonymSystem::Mint() {
  const uint64_t n = mint_counter_++;
  return PseudonymId{SplitMix64(config_.seed ^ SplitMix64(n)), n};
}

void PseudonymSystem::SetStatus(const PseudonymId& id,
                                PseudonymStatus status) {
  PseudonymRecord& rec = registry_.at(id);
  --status_counts_[rec.status];
  ++status_counts_[status];
  rec.status = status;
}

absl::Status PseudonymSystem::Provision(RsuId rsu, EntityKind kind,
                                        uint64_t count, double now) {
  if (rsu >= static_cast<RsuId>(config_.rsu_count)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("rsu %d outside [0, %d)", rsu, config_.rsu_count));
  }
  std::deque<PseudonymId>& target = pool(rsu, kind);
  for (uint64_t i = 0; i < count; ++i) {
    const PseudonymId id = Mint();
    registry_[id] = PseudonymRecord{kind, PseudonymStatus::kPooled, kNoEntity,
                                    false};
    ++status_counts_[PseudonymStatus::kPooled];
    target.push_back(id);
  }
  minted_ += count;
  if (count > 0) Log(now, kNoEntity, rsu, CaRecordType::kRestock, count);
  return absl::OkStatus();
}

uint64_t PseudonymSystem::CreditRestock(double now) {
  const double due = std::floor(config_.theta * now);
  if (!(due > static_cast<double>(vt_restock_minted_))) return 0;
  const uint64_t target = static_cast<uint64_t>(due);
  std::vector<uint64_t> per_rsu(config_.rsu_count, 0);
  for (uint64_t k = vt_restock_minted_; k < target; ++k) {
    ++per_rsu[k % static_cast<uint64_t>(config_.rsu_count)];
  }
  const uint64_t added = target - vt_restock_minted_;
  vt_restock_minted_ = target;
  for (int rsu = 0; rsu < config_.rsu_count; ++rsu) {
    Provision(static_cast<RsuId>(rsu), EntityKind::kVt, per_rsu[rsu], now)
        .IgnoreError();
  }
  return added;
}

absl::StatusOr<PseudonymSet> PseudonymSystem::RequestPseudonymSet(
    EntityId id, uint64_t count, RsuId rsu, double now) {
  EntityState* e = mutable_entity(id);
  if (e == nullptr) return UnknownEntity(id);
  if (count == 0) {
    return absl::InvalidArgumentError("requested set size must be positive");
  }
  if (e->kind == EntityKind::kVt && config_.enforce_blacklist &&
      IsBlacklisted(id)) {
    return MakeError(ErrorKind::kRevokedCounterpart,
                     absl::StrFormat("VT %d is blacklisted", id));
  }
  std::deque<PseudonymId>& source = pool(rsu, e->kind);
  if (source.size() < count) {
    return MakeError(ErrorKind::kPoolExhausted,
                     absl::StrFormat("rsu %d %s pool holds %d, requested %d",
                                     rsu, std::string(EntityKindName(e->kind)),
                                     source.size(), count));
  }
  PseudonymSet set{id, e->kind, {}, count};
  for (uint64_t i = 0; i < count; ++i) {
    const PseudonymId pid = source.front();
    source.pop_front();
    SetStatus(pid, PseudonymStatus::kIssued);
    registry_[pid].holder = id;
    e->unused.push_back(pid);
    set.pseudonyms.push_back(pid);
  }
  Log(now, id, rsu, CaRecordType::kSetRequest, count);
  if (!e->active.has_value()) {
    const PseudonymId first = e->unused.front();
    e->unused.pop_front();
    SetStatus(first, PseudonymStatus::kActive);
    e->active = first;
    activations_[first].push_back({id, now, kOpenEnd});
  }
  return set;
}

void PseudonymSystem::InvalidateSessions(EntityId id) {
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (it->first.first == id || it->first.second == id) {
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

absl::StatusOr<SessionToken> PseudonymSystem::MutualAuthenticate(
    EntityId vmu, PseudonymId vmu_pid, EntityId vt, PseudonymId vt_pid) {
  const EntityState* a = entity(vmu);
  const EntityState* b = entity(vt);
  if (a == nullptr) return UnknownEntity(vmu);
  if (b == nullptr) return UnknownEntity(vt);
  if (a->kind != EntityKind::kVmu || b->kind != EntityKind::kVt) {
    return MakeError(ErrorKind::kMixedKinds, "authentication pairs VMU and VT");
  }
  if (config_.enforce_blacklist && IsBlacklisted(vt)) {
    return MakeError(ErrorKind::kRevokedCounterpart,
                     absl::StrFormat("VT %d is blacklisted", vt));
  }
  if (a->twin != vt) {
    return MakeError(ErrorKind::kAuthFailure,
                     absl::StrFormat("VT %d is not the twin of VMU %d", vt, vmu));
  }
  auto recognized = [&](const EntityState& e, const PseudonymId& pid) {
    const PseudonymRecord* rec = record(pid);
    if (rec == nullptr || !e.active.has_value() || *e.active != pid) {
      return false;
    }
    if (rec->status != PseudonymStatus::kActive || rec->holder != e.id) {
      return false;
    }
    return !(config_.enforce_blacklist && rec->revoked);
  };
  if (!recognized(*a, vmu_pid)) {
    return MakeError(ErrorKind::kAuthFailure,
                     absl::StrFormat("VMU pseudonym %s not recognized",
                                     vmu_pid.ToHex()));
  }
  if (!recognized(*b, vt_pid)) {
    return MakeError(ErrorKind::kAuthFailure,
                     absl::StrFormat("VT pseudonym %s not recognized",
                                     vt_pid.ToHex()));
  }
  const SessionToken token{rng_.NextU64(), rng_.NextU64()};
  sessions_[{vmu, vt}] = token;
  return token;
}

absl::StatusOr<SessionToken> PseudonymSystem::MutualAuthenticate(EntityId vmu,
                                                                 EntityId vt) {
  const EntityState* a = entity(vmu);
  const EntityState* b = entity(vt);
  if (a == nullptr) return UnknownEntity(vmu);
  if (b == nullptr) return UnknownEntity(vt);
  if (!a->active.has_value() || !b->active.has_value()) {
    return MakeError(ErrorKind::kAuthFailure, "both sides need an active pseudonym");
  }
  return MutualAuthenticate(vmu, *a->active, vt, *b->active);
}

absl::Status PseudonymSystem::AcceptSensingData(
    EntityId vt, const SessionToken& token) const {
  const EntityState* b = entity(vt);
  if (b == nullptr || b->kind != EntityKind::kVt) return UnknownEntity(vt);
  if (config_.enforce_blacklist && IsBlacklisted(vt)) {
    return MakeError(ErrorKind::kRevokedCounterpart,
                     absl::StrFormat("VT %d is blacklisted", vt));
  }
  if (!config_.require_session_token) return absl::OkStatus();
  auto it = sessions_.find({b->twin, vt});
  if (it == sessions_.end() || !(it->second == token)) {
    return MakeError(ErrorKind::kAuthFailure, "missing or wrong session token");
  }
  return absl::OkStatus();
}

bool PseudonymSystem::IsBlacklisted(EntityId vt) const {
  return std::any_of(blacklist_.begin(), blacklist_.end(),
                     [vt](const BlacklistEntry& e) { return e.vt == vt; });
}

absl::StatusOr<ReportOutcome> PseudonymSystem::ReportMalicious(
    const MisbehaviorEvidence& evidence, double now) {
  const EntityState* reporter = entity(evidence.reporter);
  if (reporter == nullptr) return UnknownEntity(evidence.reporter);
  if (reporter->kind != EntityKind::kVt || IsBlacklisted(reporter->id)) {
    return MakeError(ErrorKind::kAuthFailure,
                     "reports come from legitimate VTs only");
  }
  const PseudonymRecord* rec = record(evidence.accused);
  auto spans = activations_.find(evidence.accused);
  if (rec == nullptr || rec->owner_class != EntityKind::kVt ||
      spans == activations_.end()) {
    return MakeError(ErrorKind::kEvidenceMismatch,
                     "accused pseudonym has no activation record");
  }
  const ActivationSpan* match = nullptr;
  for (const ActivationSpan& span : spans->second) {
    if (span.start <= evidence.timestamp && evidence.timestamp < span.end) {
      match = &span;
      break;
    }
  }
  if (match == nullptr) {
    return MakeError(
        ErrorKind::kEvidenceMismatch,
        absl::StrFormat("pseudonym %s was not active at %g",
                        evidence.accused.ToHex(), evidence.timestamp));
  }
  const EntityId accused = match->entity;
  for (const BlacklistEntry& entry : blacklist_) {
    if (entry.vt == accused) return ReportOutcome{entry, false};
  }
  EntityState& e = entities_[accused];
  auto revoke = [&](const PseudonymId& pid) { registry_[pid].revoked = true; };
  if (e.active.has_value()) revoke(*e.active);
  for (const PseudonymId& pid : e.unused) revoke(pid);
  for (const PseudonymId& pid : e.used) revoke(pid);
  Log(now, accused, e.region, CaRecordType::kRevocation, 1);
  const BlacklistEntry entry{accused, ca_log_.back().seq, now};
  blacklist_.push_back(entry);
  InvalidateSessions(accused);
  return ReportOutcome{entry, true};
}

absl::StatusOr<ChangeSchedule> PseudonymSystem::ScheduleChange(
    EntityId vmu, double now, bool synchronous) {
  return ScheduleChangeAt(vmu, now, now + config_.delta_sync, synchronous);
}

absl::StatusOr<ChangeSchedule> PseudonymSystem::ScheduleChangeAt(
    EntityId vmu, double now, double t_star, bool synchronous) {
  EntityState* a = mutable_entity(vmu);
  if (a == nullptr) return UnknownEntity(vmu);
  if (a->kind != EntityKind::kVmu) {
    return MakeError(ErrorKind::kMixedKinds, "changes are scheduled by VMUs");
  }
  if (!(t_star > now)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t_star %g must follow the request time %g", t_star,
                        now));
  }
  EntityState* b = nullptr;
  if (synchronous) {
    b = mutable_entity(a->twin);
    if (b == nullptr) return UnknownEntity(a->twin);
    if (config_.enforce_blacklist && IsBlacklisted(b->id)) {
      return MakeError(ErrorKind::kRevokedCounterpart,
                       absl::StrFormat("VT %d is blacklisted", b->id));
    }
  }
  const bool vmu_needs = a->available() == 0;
  const bool vt_needs = b != nullptr && b->available() == 0;
  const uint64_t w = static_cast<uint64_t>(config_.vmu_set_size);
  const uint64_t u = static_cast<uint64_t>(config_.vt_set_size);
  if (vmu_needs && PoolSize(a->region, EntityKind::kVmu) < w) {
    return MakeError(ErrorKind::kPoolExhausted,
                     absl::StrFormat("rsu %d cannot replenish VMU %d",
                                     a->region, vmu));
  }
  if (vt_needs && PoolSize(b->region, EntityKind::kVt) < u) {
    return MakeError(ErrorKind::kPoolExhausted,
                     absl::StrFormat("rsu %d cannot replenish VT %d", b->region,
                                     b->id));
  }
  if (vmu_needs) {
    if (auto s = RequestPseudonymSet(vmu, w, a->region, now); !s.ok()) {
      return s.status();
    }
  }
  if (vt_needs) {
    if (auto s = RequestPseudonymSet(b->id, u, b->region, now); !s.ok()) {
      return s.status();
    }
  }
  ChangeSchedule schedule;
  schedule.id = next_schedule_id_++;
  schedule.vmu = vmu;
  schedule.vt = b != nullptr ? b->id : kNoEntity;
  schedule.requested_at = now;
  schedule.t_star = t_star;
  schedule.synchronous = synchronous;
  schedule.state = ScheduleState::kRequested;
  ++a->reserved;
  Log(now, vmu, a->region, CaRecordType::kChangeRequest, 1);
  if (b != nullptr) {
    ++b->reserved;
    Log(now, b->id, b->region, CaRecordType::kChangeRequest, 1);
  }
  schedule.state = ScheduleState::kScheduled;
  schedules_[schedule.id] = schedule;
  return schedule;
}

const ChangeSchedule* PseudonymSystem::FindSchedule(uint64_t id) const {
  auto it = schedules_.find(id);
  return it == schedules_.end() ? nullptr : &it->second;
}

void PseudonymSystem::ChangeEntity(EntityState& e, double t,
                                   bool from_reservation) {
  if (e.active.has_value()) {
    const PseudonymId old = *e.active;
    SetStatus(old, PseudonymStatus::kUsed);
    e.used.push_back(old);
    activations_[old].back().end = t;
  }
  const PseudonymId next = e.unused.front();
  e.unused.pop_front();
  SetStatus(next, PseudonymStatus::kActive);
  e.active = next;
  activations_[next].push_back({e.id, t, kOpenEnd});
  if (from_reservation && e.reserved > 0) --e.reserved;
  e.change_epochs.push_back(t);
  Log(t, e.id, e.region, CaRecordType::kChange, 1);
  InvalidateSessions(e.id);
}

absl::Status PseudonymSystem::ExecuteChange(uint64_t schedule_id, double at) {
  const uint64_t ids[] = {schedule_id};
  return ExecuteGroupChange(ids, at).status();
}

absl::StatusOr<size_t> PseudonymSystem::ExecuteGroupChange(
    std::span<const uint64_t> ids, double at) {
  if (ids.empty()) return absl::InvalidArgumentError("empty change group");
  std::vector<EntityId> vmus;
  std::vector<EntityId> vts;
  std::set<EntityId> seen;
  std::optional<bool> synchronous;
  for (uint64_t id : ids) {
    auto it = schedules_.find(id);
    if (it == schedules_.end()) {
      return absl::NotFoundError(absl::StrFormat("no schedule %d", id));
    }
    const ChangeSchedule& s = it->second;
    if (s.state == ScheduleState::kChanged) {
      return MakeError(ErrorKind::kAlreadyChanged,
                       absl::StrFormat("schedule %d already executed", id));
    }
    if (s.t_star != at) {
      return MakeError(ErrorKind::kMissedDeadline,
                       absl::StrFormat("schedule %d is due at %.17g, not %.17g",
                                       id, s.t_star, at));
    }
    if (synchronous.has_value() && *synchronous != s.synchronous) {
      return MakeError(ErrorKind::kMixedKinds,
                       "a group cannot mix synchronous and VMU-only changes");
    }
    synchronous = s.synchronous;
    if (!seen.insert(s.vmu).second) {
      return absl::InvalidArgumentError(
          absl::StrFormat("VMU %d appears twice in one group", s.vmu));
    }
    vmus.push_back(s.vmu);
    // A VT revoked after scheduling stays frozen.
    if (s.vt != kNoEntity && !IsBlacklisted(s.vt)) vts.push_back(s.vt);
  }
  if (absl::Status s = CheckCoLocated(vmus, EntityKind::kVmu); !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckCoLocated(vts, EntityKind::kVt); !s.ok()) return s;
  for (EntityId id : vmus) ChangeEntity(entities_[id], at, true);
  for (EntityId id : vts) ChangeEntity(entities_[id], at, true);
  for (uint64_t id : ids) {
    ChangeSchedule& s = schedules_[id];
    if (s.vt != kNoEntity && IsBlacklisted(s.vt)) {
      EntityState& vt = entities_[s.vt];
      if (vt.reserved > 0) --vt.reserved;
    }
    s.state = ScheduleState::kChanged;
  }
  return vmus.size();
}

double PseudonymSystem::Distance(double a, double b) const {
  double d = std::abs(a - b);
  if (config_.road_length > 0.0) {
    d = std::fmod(d, config_.road_length);
    d = std::min(d, config_.road_length - d);
  }
  return d;
}

absl::Status PseudonymSystem::CheckCoLocated(std::span<const EntityId> members,
                                             EntityKind kind) const {
  for (size_t i = 0; i < members.size(); ++i) {
    const EntityState& a = entities_[members[i]];
    for (size_t j = i + 1; j < members.size(); ++j) {
      const EntityState& b = entities_[members[j]];
      const bool together = kind == EntityKind::kVt
                                ? a.region == b.region
                                : Distance(a.position, b.position) <=
                                      config_.hotspot_radius;
      if (!together) {
        return MakeError(
            ErrorKind::kNotCoLocated,
            absl::StrFormat("entities %d and %d are not co-located", a.id,
                            b.id));
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<size_t> PseudonymSystem::GroupChange(
    std::span<const EntityId> members, EntityKind kind, double t_star) {
  if (members.empty()) return absl::InvalidArgumentError("empty change group");
  std::set<EntityId> seen;
  for (EntityId id : members) {
    const EntityState* e = entity(id);
    if (e == nullptr) return UnknownEntity(id);
    if (e->kind != kind) {
      return MakeError(ErrorKind::kMixedKinds,
                       absl::StrFormat("entity %d is a %s", id,
                                       std::string(EntityKindName(e->kind))));
    }
    if (!seen.insert(id).second) {
      return absl::InvalidArgumentError(
          absl::StrFormat("entity %d appears twice in one group", id));
    }
    if (kind == EntityKind::kVt && IsBlacklisted(id)) {
      return MakeError(ErrorKind::kRevokedCounterpart,
                       absl::StrFormat("VT %d is blacklisted", id));
    }
    if (e->available() == 0) {
      return MakeError(ErrorKind::kSetExhausted,
                       absl::StrFormat("entity %d has no unused pseudonym", id));
    }
  }
  if (absl::Status s = CheckCoLocated(members, kind); !s.ok()) return s;
  for (EntityId id : members) ChangeEntity(entities_[id], t_star, false);
  return members.size();
}

absl::StatusOr<ShuffleTransaction> PseudonymSystem::ReturnAndShuffle(
    RsuId rsu, EntityKind kind, std::span<const PseudonymId> pseudonyms,
    double epoch) {
  if (rsu >= static_cast<RsuId>(config_.rsu_count)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("rsu %d outside [0, %d)", rsu, config_.rsu_count));
  }
  std::set<PseudonymId> distinct;
  for (const PseudonymId& pid : pseudonyms) {
    const PseudonymRecord* rec = record(pid);
    if (rec == nullptr || rec->status != PseudonymStatus::kUsed ||
        rec->owner_class != kind || rec->revoked ||
        !distinct.insert(pid).second) {
      return MakeError(
          ErrorKind::kWrongStatus,
          absl::StrFormat("pseudonym %s cannot be returned to the %s pool",
                          pid.ToHex(), std::string(EntityKindName(kind))));
    }
  }
  const uint64_t seed = rng_.NextU64();
  std::vector<PseudonymId> order(pseudonyms.begin(), pseudonyms.end());
  Rng permutation(seed);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[permutation.UniformInt(i)]);
  }
  ShuffleTransaction txn;
  txn.epoch = epoch;
  txn.rsu_id = rsu;
  txn.pool_kind = kind;
  txn.permutation_seed_commitment = CommitSeed(seed);
  std::deque<PseudonymId>& target = pool(rsu, kind);
  for (const PseudonymId& pid : order) {
    PseudonymRecord& rec = registry_[pid];
    EntityState& holder = entities_[rec.holder];
    holder.used.erase(std::find(holder.used.begin(), holder.used.end(), pid));
    SetStatus(pid, PseudonymStatus::kReturned);
    SetStatus(pid, PseudonymStatus::kPooled);
    rec.holder = kNoEntity;
    target.push_back(pid);
    txn.commitments.push_back(Commit(pid, seed));
  }
  Log(epoch, kNoEntity, rsu, CaRecordType::kReturn, order.size());
  return txn;
}

absl::Status PseudonymSystem::CheckInvariants() const {
  std::map<PseudonymStatus, uint64_t> counts;
  uint64_t total = 0;
  for (const auto& [pid, rec] : registry_) {
    ++counts[rec.status];
    ++total;
  }
  if (total != minted_) {
    return absl::InternalError(absl::StrFormat(
        "conservation: %d pseudonyms registered, %d minted", total, minted_));
  }
  for (const auto& [status, n] : counts) {
    if (CountWithStatus(status) != n) {
      return absl::InternalError(absl::StrFormat(
          "status count for %s drifted",
          std::string(PseudonymStatusName(status))));
    }
  }
  std::vector<PseudonymId> seen;
  seen.reserve(registry_.size());
  auto place = [&](const PseudonymId& pid, PseudonymStatus want,
                   EntityKind kind, EntityId holder) -> absl::Status {
    const PseudonymRecord* rec = record(pid);
    if (rec == nullptr) {
      return absl::InternalError(
          absl::StrFormat("unregistered pseudonym %s", pid.ToHex()));
    }
    seen.push_back(pid);
    if (rec->status != want || rec->owner_class != kind ||
        rec->holder != holder) {
      return absl::InternalError(absl::StrFormat(
          "pseudonym %s is %s, expected %s", pid.ToHex(),
          std::string(PseudonymStatusName(rec->status)),
          std::string(PseudonymStatusName(want))));
    }
    return absl::OkStatus();
  };
  for (const auto& [key, contents] : pools_) {
    for (const PseudonymId& pid : contents) {
      if (absl::Status s =
              place(pid, PseudonymStatus::kPooled, key.second, kNoEntity);
          !s.ok()) {
        return s;
      }
    }
  }
  uint64_t active_holders = 0;
  for (const EntityState& e : entities_) {
    if (e.active.has_value()) {
      ++active_holders;
      if (absl::Status s = place(*e.active, PseudonymStatus::kActive, e.kind,
                                 e.id);
          !s.ok()) {
        return s;
      }
    }
    for (const PseudonymId& pid : e.unused) {
      if (absl::Status s = place(pid, PseudonymStatus::kIssued, e.kind, e.id);
          !s.ok()) {
        return s;
      }
    }
    for (const PseudonymId& pid : e.used) {
      if (absl::Status s = place(pid, PseudonymStatus::kUsed, e.kind, e.id);
          !s.ok()) {
        return s;
      }
    }
    if (e.reserved > e.unused.size()) {
      return absl::InternalError(
          absl::StrFormat("entity %d reserved more than it holds", e.id));
    }
  }
  std::sort(seen.begin(), seen.end());
  if (auto dup = std::adjacent_find(seen.begin(), seen.end());
      dup != seen.end()) {
    return absl::InternalError(
        absl::StrFormat("pseudonym %s held twice", dup->ToHex()));
  }
  if (seen.size() != registry_.size()) {
    return absl::InternalError(absl::StrFormat(
        "%d pseudonyms are outside every pool and set",
        registry_.size() - seen.size()));
  }
  if (CountWithStatus(PseudonymStatus::kActive) != active_holders) {
    return absl::InternalError("one-active violated");
  }
  return absl::OkStatus();
}

}  // namespace pseudosync
