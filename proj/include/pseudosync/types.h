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

#ifndef PSEUDOSYNC_TYPES_H_
#define PSEUDOSYNC_TYPES_H_

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace pseudosync {

using EntityId = uint32_t;
using RsuId = uint32_t;

inline constexpr EntityId kNoEntity = std::numeric_limits<EntityId>::max();

// Which population an entity or a pseudonym belongs to. VMU (vehicle user)
// and VT (vehicular twin) pseudonyms are drawn from separate pools.
enum class EntityKind : uint8_t { kVmu = 0, kVt = 1 };

std::string_view EntityKindName(EntityKind kind);

// Opaque 128-bit pseudonym token.
struct PseudonymId {
  uint64_t hi = 0;
  uint64_t lo = 0;

  auto operator<=>(const PseudonymId&) const = default;
  std::array<uint8_t, 16> Bytes() const;
  std::string ToHex() const;
};

}  // namespace pseudosync

#endif  // PSEUDOSYNC_TYPES_H_
