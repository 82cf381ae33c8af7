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

#include "pseudosync/errors.h"

#include <string>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"

namespace pseudosync {
namespace {

constexpr char kPayloadUrl[] = "type.pseudosync/error-kind";

absl::StatusCode CanonicalCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kPoolExhausted:
    case ErrorKind::kSetExhausted:
      return absl::StatusCode::kResourceExhausted;
    case ErrorKind::kAuthFailure:
      return absl::StatusCode::kUnauthenticated;
    case ErrorKind::kRevokedCounterpart:
      return absl::StatusCode::kPermissionDenied;
    case ErrorKind::kEvidenceMismatch:
    case ErrorKind::kUnknownEntity:
      return absl::StatusCode::kNotFound;
    case ErrorKind::kMissedDeadline:
      return absl::StatusCode::kDeadlineExceeded;
    case ErrorKind::kAlreadyChanged:
    case ErrorKind::kWrongStatus:
    case ErrorKind::kEpochRegression:
    case ErrorKind::kNotCoLocated:
      return absl::StatusCode::kFailedPrecondition;
    case ErrorKind::kMixedKinds:
      return absl::StatusCode::kInvalidArgument;
  }
  return absl::StatusCode::kUnknown;
}

}  // namespace

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kPoolExhausted:
      return "PoolExhausted";
    case ErrorKind::kSetExhausted:
      return "SetExhausted";
    case ErrorKind::kAuthFailure:
      return "AuthFailure";
    case ErrorKind::kRevokedCounterpart:
      return "RevokedCounterpart";
    case ErrorKind::kEvidenceMismatch:
      return "EvidenceMismatch";
    case ErrorKind::kMissedDeadline:
      return "MissedDeadline";
    case ErrorKind::kAlreadyChanged:
      return "AlreadyChanged";
    case ErrorKind::kMixedKinds:
      return "MixedKinds";
    case ErrorKind::kNotCoLocated:
      return "NotCoLocated";
    case ErrorKind::kWrongStatus:
      return "WrongStatus";
    case ErrorKind::kEpochRegression:
      return "EpochRegression";
    case ErrorKind::kUnknownEntity:
      return "UnknownEntity";
  }
  return "Unknown";
}

absl::Status MakeError(ErrorKind kind, std::string_view message) {
  absl::Status status(CanonicalCode(kind),
                      absl::StrCat(std::string(ErrorKindName(kind)), ": ", std::string(message)));
  status.SetPayload(kPayloadUrl,
                    absl::Cord(std::to_string(static_cast<int>(kind))));
  return status;
}

std::optional<ErrorKind> GetErrorKind(const absl::Status& status) {
  absl::optional<absl::Cord> payload = status.GetPayload(kPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  return static_cast<ErrorKind>(std::stoi(std::string(*payload)));
}

}  // namespace pseudosync
