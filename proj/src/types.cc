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

#include "pseudosync/types.h"

#include "absl/strings/str_format.h"

namespace pseudosync {

std::string_view EntityKindName(EntityKind kind) {
  return kind == EntityKind::kVmu ? "vmu" : "vt";
}

std::array<uint8_t, 16> PseudonymId::Bytes() const {
  std::array<uint8_t, 16> out;
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<uint8_t>(hi >> (56 - 8 * i));
    out[8 + i] = static_cast<uint8_t>(lo >> (56 - 8 * i));
  }
  return out;
}

std::string PseudonymId::ToHex() const {
  return absl::StrFormat("%016x%016x", hi, lo);
}

}  // namespace pseudosync
