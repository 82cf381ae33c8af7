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

// Dual-pseudonym scheme for vehicle users (VMUs) and their vehicular twins
// (VTs): pseudonym registry and pools, mutual authentication with session
// tokens, the VT blacklist, scheduled synchronous changes, group changes and
// the return-and-shuffle cycle.
//
// Status lifecycle of a pseudonym:
//
//   pooled -> issued -> active -> used -> returned -> pooled
//
// All state is owned by one PseudonymSystem and mutated from a single event
// loop. Every operation is all-or-nothing: a failed call leaves the state
// unchanged.

#ifndef PSEUDOSYNC_PROTOCOL_H_
#define PSEUDOSYNC_PROTOCOL_H_

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pseudosync/ledger.h"
#include "pseudosync/rng.h"
#include "pseudosync/types.h"

namespace pseudosync {

enum class PseudonymStatus : uint8_t {
  kPooled,
  kIssued,
  kActive,
  kUsed,
  kReturned,
};

std::string_view PseudonymStatusName(PseudonymStatus status);

struct PseudonymRecord {
  EntityKind owner_class = EntityKind::kVmu;
  PseudonymStatus status = PseudonymStatus::kPooled;
  EntityId holder = kNoEntity;
  bool revoked = false;
};

struct PseudonymSet {
  EntityId owner = kNoEntity;
  EntityKind kind = EntityKind::kVmu;
  std::vector<PseudonymId> pseudonyms;
  size_t capacity = 0;
};

struct EntityState {
  EntityId id = kNoEntity;
  EntityKind kind = EntityKind::kVmu;
  EntityId twin = kNoEntity;
  RsuId region = 0;
  double position = 0.0;  // road coordinate of the VMU; VTs mirror their VMU
  std::optional<PseudonymId> active;
  std::deque<PseudonymId> unused;  // status issued, in activation order
  std::vector<PseudonymId> used;   // status used, awaiting return
  size_t reserved = 0;             // unused pseudonyms promised to schedules
  std::vector<double> change_epochs;

  size_t available() const { return unused.size() - reserved; }
};

enum class ScheduleState : uint8_t { kIdle, kRequested, kScheduled, kChanged };

struct ChangeSchedule {
  uint64_t id = 0;
  EntityId vmu = kNoEntity;
  EntityId vt = kNoEntity;  // kNoEntity for a VMU-only (asynchronous) change
  double requested_at = 0.0;
  double t_star = 0.0;
  bool synchronous = true;
  ScheduleState state = ScheduleState::kIdle;
};

struct SessionToken {
  uint64_t hi = 0;
  uint64_t lo = 0;
  bool operator==(const SessionToken&) const = default;
};

struct BlacklistEntry {
  EntityId vt = kNoEntity;
  uint64_t evidence_ref = 0;  // CA log sequence number of the revocation
  double revoked_at = 0.0;
};

enum class CaRecordType : uint8_t {
  kSetRequest,
  kChangeRequest,
  kChange,
  kRestock,
  kRevocation,
  kReturn,
};

std::string_view CaRecordTypeName(CaRecordType type);

struct CaLogRecord {
  uint64_t seq = 0;
  double timestamp = 0.0;
  EntityId entity = kNoEntity;
  RsuId rsu = 0;
  CaRecordType type = CaRecordType::kSetRequest;
  uint64_t count = 0;

  bool operator==(const CaLogRecord&) const = default;
};

struct MisbehaviorEvidence {
  EntityId reporter = kNoEntity;
  PseudonymId accused;
  double timestamp = 0.0;
};

struct ReportOutcome {
  BlacklistEntry entry;
  bool newly_added = false;
};

struct ProtocolConfig {
  double delta_sync = 1.0;
  int vmu_set_size = 5;  // w
  int vt_set_size = 5;   // u
  double hotspot_radius = 10.0;
  double road_length = 0.0;  // ring length for distances; 0 means a line
  double theta = 10.0;       // VT pool restock per unit time
  int rsu_count = 1;
  bool require_session_token = true;
  bool enforce_blacklist = true;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

class PseudonymSystem {
 public:
  static absl::StatusOr<PseudonymSystem> Create(const ProtocolConfig& config);

  // Registers an entity. VTs are hosted on region.
  EntityId AddEntity(EntityKind kind, RsuId region, double position);
  absl::Status LinkTwins(EntityId vmu, EntityId vt);
  // Moves a VMU and migrates a VT, keeping its hosting RSU current.
  absl::Status SetLocation(EntityId entity, RsuId region, double position);

  // CA minting into an RSU pool.
  absl::Status Provision(RsuId rsu, EntityKind kind, uint64_t count,
                         double now);
  // Credits VT pools up to floor(theta * now) minted pseudonyms in total,
  // spread round-robin across RSUs. Returns the number minted.
  uint64_t CreditRestock(double now);

  // Moves count pseudonyms pooled -> issued into the entity's set. When the
  // entity has no active pseudonym the first one is activated.
  absl::StatusOr<PseudonymSet> RequestPseudonymSet(EntityId entity,
                                                   uint64_t count, RsuId rsu,
                                                   double now);

  // Checks the presented pseudonyms and the blacklist and opens a session.
  absl::StatusOr<SessionToken> MutualAuthenticate(EntityId vmu,
                                                  PseudonymId vmu_pid,
                                                  EntityId vt,
                                                  PseudonymId vt_pid);
  absl::StatusOr<SessionToken> MutualAuthenticate(EntityId vmu, EntityId vt);
  // Intra-twin message gate: the VT accepts data only under its session.
  absl::Status AcceptSensingData(EntityId vt, const SessionToken& token) const;

  absl::StatusOr<ReportOutcome> ReportMalicious(
      const MisbehaviorEvidence& evidence, double now);
  bool IsBlacklisted(EntityId vt) const;

  // Schedules a change at now + delta_sync, replenishing the VMU set and,
  // when synchronous, the VT set first.
  absl::StatusOr<ChangeSchedule> ScheduleChange(EntityId vmu, double now,
                                                bool synchronous);
  // Same, but aligned to an existing group time t_star > now.
  absl::StatusOr<ChangeSchedule> ScheduleChangeAt(EntityId vmu, double now,
                                                  double t_star,
                                                  bool synchronous);
  absl::Status ExecuteChange(uint64_t schedule_id, double at);
  // Executes several schedules sharing t_star as one group per layer.
  // Returns the group size G.
  absl::StatusOr<size_t> ExecuteGroupChange(std::span<const uint64_t> ids,
                                            double at);
  const ChangeSchedule* FindSchedule(uint64_t id) const;

  // Changes every member at t_star. Members must be one kind, not
  // blacklisted, and co-located (VTs on one RSU, VMUs within the hot-spot
  // radius). Returns G.
  absl::StatusOr<size_t> GroupChange(std::span<const EntityId> members,
                                     EntityKind kind, double t_star);

  absl::StatusOr<ShuffleTransaction> ReturnAndShuffle(
      RsuId rsu, EntityKind kind, std::span<const PseudonymId> pseudonyms,
      double epoch);

  // Conservation, status consistency and one-active checks.
  absl::Status CheckInvariants() const;

  const EntityState* entity(EntityId id) const;
  const PseudonymRecord* record(const PseudonymId& id) const;
  size_t PoolSize(RsuId rsu, EntityKind kind) const;
  std::vector<PseudonymId> PoolContents(RsuId rsu, EntityKind kind) const;
  uint64_t minted() const { return minted_; }
  uint64_t CountWithStatus(PseudonymStatus status) const;
  const std::vector<CaLogRecord>& ca_log() const { return ca_log_; }
  const std::vector<BlacklistEntry>& blacklist() const { return blacklist_; }
  const std::vector<EntityState>& entities() const { return entities_; }
  const ProtocolConfig& config() const { return config_; }

 private:
  struct ActivationSpan {
    EntityId entity;
    double start;
    double end;
  };

  explicit PseudonymSystem(const ProtocolConfig& config);

  EntityState* mutable_entity(EntityId id);
  std::deque<PseudonymId>& pool(RsuId rsu, EntityKind kind);
  void Log(double t, EntityId entity, RsuId rsu, CaRecordType type,
           uint64_t count);
  PseudonymId Mint();
  void SetStatus(const PseudonymId& id, PseudonymStatus status);
  // Retires the active pseudonym and activates the next unused one.
  void ChangeEntity(EntityState& e, double t, bool from_reservation);
  absl::Status CheckCoLocated(std::span<const EntityId> members,
                              EntityKind kind) const;
  void InvalidateSessions(EntityId entity);
  double Distance(double a, double b) const;

  ProtocolConfig config_;
  Rng rng_;
  uint64_t mint_counter_ = 0;
  uint64_t minted_ = 0;
  uint64_t vt_restock_minted_ = 0;
  uint64_t next_schedule_id_ = 1;
  std::map<PseudonymId, PseudonymRecord> registry_;
  std::map<PseudonymStatus, uint64_t> status_counts_;
  std::map<std::pair<RsuId, EntityKind>, std::deque<PseudonymId>> pools_;
  std::vector<EntityState> entities_;
  std::map<uint64_t, ChangeSchedule> schedules_;
  std::map<PseudonymId, std::vector<ActivationSpan>> activations_;
  std::map<std::pair<EntityId, EntityId>, SessionToken> sessions_;
  std::vector<BlacklistEntry> blacklist_;
  std::vector<CaLogRecord> ca_log_;
};

}  // namespace pseudosync

#endif  // PSEUDOSYNC_PROTOCOL_H_
