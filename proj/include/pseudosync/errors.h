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

#ifndef PSEUDOSYNC_ERRORS_H_
#define PSEUDOSYNC_ERRORS_H_

#include <optional>
#include <string_view>

#include "absl/status/status.h"

namespace pseudosync {

// Domain-specific failure reasons. Each maps onto a canonical absl status code
// and is attached to the status as a payload so callers can tell apart two
// reasons sharing a canonical code.
enum class ErrorKind {
  kPoolExhausted,
  kSetExhausted,
  kAuthFailure,
  kRevokedCounterpart,
  kEvidenceMismatch,
  kMissedDeadline,
  kAlreadyChanged,
  kMixedKinds,
  kNotCoLocated,
  kWrongStatus,
  kEpochRegression,
  kUnknownEntity,
};

absl::Status MakeError(ErrorKind kind, std::string_view message);

// Returns the kind attached by MakeError, or nullopt for plain statuses.
std::optional<ErrorKind> GetErrorKind(const absl::Status& status);

std::string_view ErrorKindName(ErrorKind kind);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_ERRORS_H_
