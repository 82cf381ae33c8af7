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

// Poisson model of how many pseudonym changes a vehicle wants in one
// observation period. One pseudonym is consumed per change.

#ifndef PSEUDOSYNC_DEMAND_H_
#define PSEUDOSYNC_DEMAND_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pseudosync/rng.h"

namespace pseudosync {

inline constexpr double kDefaultTailTolerance = 1e-9;

struct DemandModel {
  double frequency = 0.0;  // changes per unit time
  double period = 1.0;

  static absl::StatusOr<DemandModel> Create(double frequency, double period);
  absl::Status Validate() const;
  double Rate() const { return frequency * period; }
};

// Poisson masses over 0..N with N the smallest count whose cumulative mass
// reaches 1 - epsilon. The mass beyond N is kept in truncation_mass.
struct DemandPmf {
  std::vector<double> probabilities;
  double truncation_mass = 0.0;

  int64_t truncation_count() const {
    return static_cast<int64_t>(probabilities.size()) - 1;
  }
  double Mean() const;
};

absl::StatusOr<DemandPmf> ComputeDemandPmf(
    const DemandModel& model, double epsilon = kDefaultTailTolerance);

// Unchecked variant for callers that already validated the rate.
DemandPmf PoissonPmf(double rate, double epsilon);

// One Poisson(frequency * period) draw. Identical seeds give identical draws.
int64_t SampleDemand(const DemandModel& model, uint64_t seed);
int64_t SampleDemand(const DemandModel& model, Rng& rng);

// Arrival epochs of a homogeneous Poisson process on [0, period), in order.
std::vector<double> SampleArrivalTimes(const DemandModel& model, Rng& rng);

// Maximum-likelihood rate from change timestamps observed over [0, window].
absl::StatusOr<double> EstimateFrequency(std::span<const double> timestamps,
                                         double window);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_DEMAND_H_
