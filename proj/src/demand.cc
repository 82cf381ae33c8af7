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

#include "pseudosync/demand.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace pseudosync {

absl::StatusOr<DemandModel> DemandModel::Create(double frequency,
                                                double period) {
  DemandModel model{frequency, period};
  if (absl::Status s = model.Validate(); !s.ok()) return s;
  return model;
}

absl::Status DemandModel::Validate() const {
  if (!(frequency >= 0.0) || std::isinf(frequency)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("frequency must be finite and >= 0, got %g",
                        frequency));
  }
  if (!(period > 0.0) || std::isinf(period)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("period must be finite and > 0, got %g", period));
  }
  return absl::OkStatus();
}

double DemandPmf::Mean() const {
  double mean = 0.0;
  for (size_t k = 0; k < probabilities.size(); ++k) {
    mean += static_cast<double>(k) * probabilities[k];
  }
  return mean;
}

DemandPmf PoissonPmf(double rate, double epsilon) {
  DemandPmf pmf;
  if (rate <= 0.0) {
    pmf.probabilities = {1.0};
    return pmf;
  }
  // Seed the recurrence at the mode so that large rates, whose e^-rate
  // underflows, still produce correct masses; walk down to 0 and then up.
  const int64_t mode = static_cast<int64_t>(std::floor(rate));
  const double log_mode_mass = -rate + static_cast<double>(mode) *
                                           std::log(rate) -
                                           std::lgamma(mode + 1.0);
  std::vector<double>& p = pmf.probabilities;
  p.assign(mode + 1, 0.0);
  p[mode] = std::exp(log_mode_mass);
  for (int64_t k = mode; k > 0; --k) {
    p[k - 1] = p[k] * static_cast<double>(k) / rate;
  }
  double cumulative = 0.0;
  for (double mass : p) cumulative += mass;
  // The smallest N with cumulative mass >= 1 - epsilon may lie below the mode
  // only when epsilon is huge; trim in that case.
  if (cumulative >= 1.0 - epsilon) {
    double running = 0.0;
    for (size_t k = 0; k < p.size(); ++k) {
      running += p[k];
      if (running >= 1.0 - epsilon) {
        p.resize(k + 1);
        cumulative = running;
        break;
      }
    }
  }
  while (cumulative < 1.0 - epsilon) {
    const int64_t k = static_cast<int64_t>(p.size());
    const double next = p.back() * rate / static_cast<double>(k);
    if (next == 0.0) break;
    p.push_back(next);
    cumulative += next;
  }
  pmf.truncation_mass = std::max(0.0, 1.0 - cumulative);
  return pmf;
}

absl::StatusOr<DemandPmf> ComputeDemandPmf(const DemandModel& model,
                                           double epsilon) {
  if (absl::Status s = model.Validate(); !s.ok()) return s;
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("tail tolerance must lie in (0, 1), got %g", epsilon));
  }
  return PoissonPmf(model.Rate(), epsilon);
}

int64_t SampleDemand(const DemandModel& model, uint64_t seed) {
  Rng rng(seed);
  return SampleDemand(model, rng);
}

int64_t SampleDemand(const DemandModel& model, Rng& rng) {
  return rng.Poisson(model.Rate());
}

std::vector<double> SampleArrivalTimes(const DemandModel& model, Rng& rng) {
  std::vector<double> arrivals;
  if (model.frequency <= 0.0) return arrivals;
  double t = rng.Exponential(model.frequency);
  while (t < model.period) {
    arrivals.push_back(t);
    t += rng.Exponential(model.frequency);
  }
  return arrivals;
}

absl::StatusOr<double> EstimateFrequency(std::span<const double> timestamps,
                                         double window) {
  if (!(window > 0.0) || std::isinf(window)) {
    return absl::InvalidArgumentError("observation window must be positive");
  }
  for (size_t i = 0; i < timestamps.size(); ++i) {
    if (!(timestamps[i] >= 0.0 && timestamps[i] <= window)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "timestamp %g lies outside [0, %g]", timestamps[i], window));
    }
    if (i > 0 && !(timestamps[i - 1] < timestamps[i])) {
      return absl::InvalidArgumentError(
          "timestamps must be strictly increasing");
    }
  }
  return static_cast<double>(timestamps.size()) / window;
}

}  // namespace pseudosync
