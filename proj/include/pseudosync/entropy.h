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

// Privacy entropy of a vehicle's identity, in bits.
//
// After each pseudonym change the entropy jumps to the reset level
// h_max - p * h_0 and then decays linearly with slope alpha until it hits the
// floor h_min, producing a sawtooth over time. p is the probability that the
// vehicle is still being tracked after a change.

#ifndef PSEUDOSYNC_ENTROPY_H_
#define PSEUDOSYNC_ENTROPY_H_

#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace pseudosync {

struct EntropyParams {
  double h_max = 1.5;
  double h_0 = 1.0;
  double h_min = 0.25;
  double alpha = 1.0;  // bits per unit time
  double p = 0.5;

  static absl::StatusOr<EntropyParams> Create(double h_max, double h_0,
                                              double h_min, double alpha,
                                              double p);
  absl::Status Validate() const;

  bool operator==(const EntropyParams&) const = default;
};

// h_max - p * h_0.
double ResetLevel(const EntropyParams& params);

// Time for the curve to fall from the reset level to the floor. Infinite when
// alpha is zero.
double DecayTime(const EntropyParams& params);

absl::StatusOr<double> InstantaneousEntropy(const EntropyParams& params,
                                            double t_since_change);

// -log2(p): entropy of an identity that is tracked with probability p.
absl::StatusOr<double> TrackingEntropy(double p);

// Area under one sawtooth tooth of length tau divided by tau. tau may be
// +infinity (never changing), in which case the limit is returned.
absl::StatusOr<double> AverageEntropy(const EntropyParams& params, double tau);

struct EntropyPoint {
  double time = 0.0;
  double entropy = 0.0;

  bool operator==(const EntropyPoint&) const = default;
};

// Piecewise-linear sawtooth over [0, horizon]. Each segment starts at a reset
// epoch and holds strictly increasing breakpoint times; consecutive segments
// share their boundary time, where the curve jumps back to the reset level.
class EntropyTimeline {
 public:
  struct Segment {
    std::vector<EntropyPoint> points;
  };

  EntropyTimeline(std::vector<Segment> segments, double horizon)
      : segments_(std::move(segments)), horizon_(horizon) {}

  const std::vector<Segment>& segments() const { return segments_; }
  double horizon() const { return horizon_; }

  // Right-continuous value at t (the post-reset value at a change epoch).
  double ValueAt(double t) const;
  // Limit from the left at t; equals ValueAt away from change epochs.
  double LeftLimit(double t) const;
  double Minimum() const;
  // All breakpoints in time order. A change epoch appears twice: first with
  // the decayed value, then with the reset value.
  std::vector<EntropyPoint> Flatten() const;

 private:
  std::vector<Segment> segments_;
  double horizon_;
};

// Builds the sawtooth for a vehicle that changes pseudonym at each of
// `change_epochs` (strictly increasing, within [0, horizon]). Time 0 is always
// treated as a reset.
absl::StatusOr<EntropyTimeline> BuildTimeline(
    const EntropyParams& params, std::span<const double> change_epochs,
    double horizon);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_ENTROPY_H_
