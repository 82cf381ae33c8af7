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

#include "pseudosync/entropy.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"

namespace pseudosync {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Appends the decaying tooth that starts at `start` and runs to `end`.
EntropyTimeline::Segment MakeSegment(const EntropyParams& params, double start,
                                     double end) {
  const double reset = ResetLevel(params);
  EntropyTimeline::Segment segment;
  segment.points.push_back({start, reset});
  if (end <= start) return segment;
  const double knee = start + DecayTime(params);
  if (knee < end) {
    if (knee > start) segment.points.push_back({knee, params.h_min});
    segment.points.push_back({end, params.h_min});
  } else {
    segment.points.push_back({end, reset - params.alpha * (end - start)});
  }
  return segment;
}

double Interpolate(const std::vector<EntropyPoint>& points, double t) {
  auto upper = std::upper_bound(
      points.begin(), points.end(), t,
      [](double value, const EntropyPoint& p) { return value < p.time; });
  if (upper == points.begin()) return points.front().entropy;
  if (upper == points.end()) return points.back().entropy;
  const EntropyPoint& a = *(upper - 1);
  const EntropyPoint& b = *upper;
  const double w = (t - a.time) / (b.time - a.time);
  return a.entropy + w * (b.entropy - a.entropy);
}

}  // namespace

absl::StatusOr<EntropyParams> EntropyParams::Create(double h_max, double h_0,
                                                    double h_min, double alpha,
                                                    double p) {
  EntropyParams params{h_max, h_0, h_min, alpha, p};
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  return params;
}

absl::Status EntropyParams::Validate() const {
  if (!(p > 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("p must lie in (0, 1], got %g", p));
  }
  if (!(h_min >= 0.0)) {
    return absl::InvalidArgumentError("h_min must be non-negative");
  }
  if (!(alpha >= 0.0) || std::isinf(alpha)) {
    return absl::InvalidArgumentError("alpha must be finite and non-negative");
  }
  const double reset = h_max - p * h_0;
  if (!(h_min <= reset && reset <= h_max)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "reset level %g must lie in [h_min=%g, h_max=%g]", reset, h_min,
        h_max));
  }
  return absl::OkStatus();
}

double ResetLevel(const EntropyParams& params) {
  return params.h_max - params.p * params.h_0;
}

double DecayTime(const EntropyParams& params) {
  if (params.alpha == 0.0) return kInf;
  return (ResetLevel(params) - params.h_min) / params.alpha;
}

absl::StatusOr<double> InstantaneousEntropy(const EntropyParams& params,
                                            double t_since_change) {
  if (!(t_since_change >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "time since change must be non-negative, got %g", t_since_change));
  }
  if (params.alpha == 0.0) return ResetLevel(params);
  return std::max(params.h_min,
                  ResetLevel(params) - params.alpha * t_since_change);
}

absl::StatusOr<double> TrackingEntropy(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("tracking probability must lie in (0, 1], got %g", p));
  }
  // -log2(1) is -0.0; report a clean zero.
  return p == 1.0 ? 0.0 : -std::log2(p);
}

absl::StatusOr<double> AverageEntropy(const EntropyParams& params, double tau) {
  if (!(tau > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("interval must be positive, got %g", tau));
  }
  const double reset = ResetLevel(params);
  const double t_f = DecayTime(params);
  if (tau <= t_f) {
    if (std::isinf(tau)) return reset;  // alpha == 0
    return reset - params.alpha * tau / 2.0;
  }
  if (std::isinf(tau)) return params.h_min;
  return (t_f * (reset + params.h_min) / 2.0 + (tau - t_f) * params.h_min) /
         tau;
}

double EntropyTimeline::ValueAt(double t) const {
  // Last segment whose start is <= t.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double value, const Segment& s) {
                               return value < s.points.front().time;
                             });
  if (it == segments_.begin()) return segments_.front().points.front().entropy;
  return Interpolate((it - 1)->points, t);
}

double EntropyTimeline::LeftLimit(double t) const {
  // Last segment whose start is < t.
  auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                             [](const Segment& s, double value) {
                               return s.points.front().time < value;
                             });
  if (it == segments_.begin()) return segments_.front().points.front().entropy;
  return Interpolate((it - 1)->points, t);
}

double EntropyTimeline::Minimum() const {
  double lowest = kInf;
  for (const Segment& segment : segments_) {
    for (const EntropyPoint& p : segment.points) {
      lowest = std::min(lowest, p.entropy);
    }
  }
  return lowest;
}

std::vector<EntropyPoint> EntropyTimeline::Flatten() const {
  std::vector<EntropyPoint> out;
  for (const Segment& segment : segments_) {
    out.insert(out.end(), segment.points.begin(), segment.points.end());
  }
  return out;
}

absl::StatusOr<EntropyTimeline> BuildTimeline(
    const EntropyParams& params, std::span<const double> change_epochs,
    double horizon) {
  if (!(horizon > 0.0) || std::isinf(horizon)) {
    return absl::InvalidArgumentError("horizon must be positive and finite");
  }
  for (size_t i = 0; i < change_epochs.size(); ++i) {
    const double t = change_epochs[i];
    if (!(t >= 0.0 && t <= horizon)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "change epoch %g lies outside [0, %g]", t, horizon));
    }
    if (i > 0 && !(change_epochs[i - 1] < t)) {
      return absl::InvalidArgumentError(
          "change epochs must be strictly increasing");
    }
  }
  std::vector<double> starts = {0.0};
  for (double t : change_epochs) {
    if (t > 0.0) starts.push_back(t);
  }
  std::vector<EntropyTimeline::Segment> segments;
  segments.reserve(starts.size());
  for (size_t i = 0; i < starts.size(); ++i) {
    const double end = i + 1 < starts.size() ? starts[i + 1] : horizon;
    segments.push_back(MakeSegment(params, starts[i], end));
  }
  return EntropyTimeline(std::move(segments), horizon);
}

}  // namespace pseudosync
