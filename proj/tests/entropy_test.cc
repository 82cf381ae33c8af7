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

#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "pseudosync/rng.h"
#include "test_oracles.h"

namespace pseudosync {
namespace {

EntropyParams CaseStudy(double p) { return EntropyParams{1.5, 1.0, 0.25, 1.0, p}; }

TEST(EntropyParamsTest, RejectsInvalid) {
  EXPECT_FALSE(EntropyParams::Create(1.5, 1, 0.25, 1, 0.0).ok());
  EXPECT_FALSE(EntropyParams::Create(1.5, 1, 0.25, 1, 1.2).ok());
  EXPECT_FALSE(EntropyParams::Create(1.5, 1, -0.1, 1, 0.5).ok());
  EXPECT_FALSE(EntropyParams::Create(1.5, 1, 0.25, -1, 0.5).ok());
  // Reset level 0.5 below the floor 0.75.
  EXPECT_FALSE(EntropyParams::Create(1.5, 1, 0.75, 1, 1.0).ok());
  EXPECT_TRUE(EntropyParams::Create(1.5, 1, 0.25, 1, 0.5).ok());
}

TEST(EntropyTest, ResetLevel) {
  EXPECT_DOUBLE_EQ(ResetLevel({1.5, 1, 0.25, 1, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(ResetLevel({1.5, 1, 0.25, 1, 1.0}), 0.5);
  EXPECT_DOUBLE_EQ(ResetLevel({2, 0, 0.25, 1, 0.3}), 2.0);
}

TEST(EntropyTest, InstantaneousEntropy) {
  EXPECT_DOUBLE_EQ(*InstantaneousEntropy(CaseStudy(0.5), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(*InstantaneousEntropy(CaseStudy(0.5), 0.5), 0.5);
  EXPECT_DOUBLE_EQ(*InstantaneousEntropy(CaseStudy(0.5), 2.0), 0.25);
  EXPECT_FALSE(InstantaneousEntropy(CaseStudy(0.5), -0.1).ok());
}

TEST(EntropyTest, TrackingEntropy) {
  EXPECT_EQ(*TrackingEntropy(1.0), 0.0);
  EXPECT_DOUBLE_EQ(*TrackingEntropy(0.5), 1.0);
  EXPECT_DOUBLE_EQ(*TrackingEntropy(0.25), 2.0);
  EXPECT_FALSE(TrackingEntropy(0.0).ok());
  EXPECT_FALSE(TrackingEntropy(1.5).ok());
}

TEST(EntropyTest, TrackingEntropyStrictlyDecreasing) {
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 1000; ++i) {
    const double h = *TrackingEntropy(i / 1000.0);
    EXPECT_LT(h, previous);
    previous = h;
  }
}

TEST(EntropyTest, AverageEntropyCaseStudyValues) {
  // Frozen from the trapezoid oracle (10^6 steps).
  EXPECT_NEAR(*AverageEntropy(CaseStudy(0.5), 0.75), 0.625, 1e-12);
  EXPECT_NEAR(*AverageEntropy(CaseStudy(0.5), 1.5), 0.4375, 1e-12);
  EXPECT_NEAR(testing_oracles::TrapezoidAverageEntropy(CaseStudy(0.5), 0.75,
                                                       1000000),
              0.625, 1e-6);
  EXPECT_NEAR(testing_oracles::TrapezoidAverageEntropy(CaseStudy(0.5), 1.5,
                                                       1000000),
              0.4375, 1e-6);
}

TEST(EntropyTest, AverageEntropyNoDecay) {
  EntropyParams flat{1.5, 1.0, 0.25, 0.0, 0.3};
  for (double tau : {0.1, 1.0, 100.0}) {
    EXPECT_DOUBLE_EQ(*AverageEntropy(flat, tau), ResetLevel(flat));
  }
  EXPECT_DOUBLE_EQ(
      *AverageEntropy(flat, std::numeric_limits<double>::infinity()),
      ResetLevel(flat));
  EXPECT_DOUBLE_EQ(*AverageEntropy(CaseStudy(0.5),
                                   std::numeric_limits<double>::infinity()),
                   0.25);
}

TEST(EntropyTest, AverageEntropyRejectsNonPositiveInterval) {
  EXPECT_FALSE(AverageEntropy(CaseStudy(0.5), 0.0).ok());
  EXPECT_FALSE(AverageEntropy(CaseStudy(0.5), -1.0).ok());
}

TEST(EntropyPropertyTest, AverageEntropyBoundsMonotoneAndContinuous) {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const EntropyParams params = testing_oracles::RandomEntropyParams(rng);
    const double reset = ResetLevel(params);
    double previous = std::numeric_limits<double>::infinity();
    for (double tau = 0.01; tau < 20.0; tau *= 1.3) {
      const double avg = *AverageEntropy(params, tau);
      EXPECT_GE(avg, params.h_min - 1e-12);
      EXPECT_LE(avg, reset + 1e-12);
      EXPECT_LE(reset, params.h_max);
      EXPECT_LE(avg, previous + 1e-12);
      previous = avg;
    }
    const double t_f = DecayTime(params);
    if (std::isfinite(t_f) && t_f > 0.0) {
      const double branch_linear = reset - params.alpha * t_f / 2.0;
      const double branch_floor =
          (t_f * (reset + params.h_min) / 2.0) / t_f;
      EXPECT_NEAR(*AverageEntropy(params, t_f), branch_linear, 1e-12);
      EXPECT_NEAR(branch_linear, branch_floor, 1e-12);
      EXPECT_NEAR(*AverageEntropy(params, std::nextafter(t_f, 1e300)),
                  branch_linear, 1e-12);
    }
  }
}

TEST(EntropyTimelineTest, NoEpochsSingleSegment) {
  absl::StatusOr<EntropyTimeline> timeline =
      BuildTimeline(CaseStudy(0.5), {}, 1.0);
  ASSERT_TRUE(timeline.ok());
  EXPECT_EQ(timeline->segments().size(), 1u);
  EXPECT_DOUBLE_EQ(timeline->ValueAt(0.0), 1.0);
  EXPECT_DOUBLE_EQ(timeline->ValueAt(0.5), 0.5);
  EXPECT_DOUBLE_EQ(timeline->ValueAt(1.0), 0.25);
}

TEST(EntropyTimelineTest, JumpAtEpoch) {
  const std::vector<double> epochs = {0.5};
  absl::StatusOr<EntropyTimeline> timeline =
      BuildTimeline(CaseStudy(0.5), epochs, 2.0);
  ASSERT_TRUE(timeline.ok());
  EXPECT_DOUBLE_EQ(timeline->LeftLimit(0.5), 0.5);
  EXPECT_DOUBLE_EQ(timeline->ValueAt(0.5), 1.0);
  // Piecewise oracle: instantaneous entropy since the latest reset.
  for (double t = 0.0; t <= 2.0; t += 0.01) {
    const double since = t >= 0.5 ? t - 0.5 : t;
    EXPECT_NEAR(timeline->ValueAt(t),
                *InstantaneousEntropy(CaseStudy(0.5), since), 1e-12)
        << "t=" << t;
  }
}

TEST(EntropyTimelineTest, FrequentChangesStayAboveFloor) {
  const EntropyParams params = CaseStudy(0.5);  // t_f = 0.75
  const double tau = 0.5;
  std::vector<double> epochs;
  for (double t = tau; t <= 10.0; t += tau) epochs.push_back(t);
  absl::StatusOr<EntropyTimeline> timeline = BuildTimeline(params, epochs, 10.0);
  ASSERT_TRUE(timeline.ok());
  EXPECT_NEAR(timeline->Minimum(), ResetLevel(params) - params.alpha * tau,
              1e-12);
  EXPECT_GT(timeline->Minimum(), params.h_min);
}

TEST(EntropyTimelineTest, InvariantsHold) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const EntropyParams params = testing_oracles::RandomEntropyParams(rng);
    std::vector<double> epochs;
    double t = 0.0;
    while (true) {
      t += rng.Exponential(1.0);
      if (t >= 20.0) break;
      epochs.push_back(t);
    }
    absl::StatusOr<EntropyTimeline> timeline =
        BuildTimeline(params, epochs, 20.0);
    ASSERT_TRUE(timeline.ok());
    for (const EntropyTimeline::Segment& segment : timeline->segments()) {
      for (size_t i = 0; i < segment.points.size(); ++i) {
        EXPECT_GE(segment.points[i].entropy, params.h_min - 1e-12);
        EXPECT_LE(segment.points[i].entropy, params.h_max + 1e-12);
        if (i > 0) {
          EXPECT_LT(segment.points[i - 1].time, segment.points[i].time);
          EXPECT_LE(segment.points[i].entropy, segment.points[i - 1].entropy);
        }
      }
    }
  }
}

TEST(EntropyTimelineTest, RejectsBadEpochs) {
  const std::vector<double> unsorted = {0.5, 0.2};
  EXPECT_FALSE(BuildTimeline(CaseStudy(0.5), unsorted, 1.0).ok());
  const std::vector<double> duplicate = {0.5, 0.5};
  EXPECT_FALSE(BuildTimeline(CaseStudy(0.5), duplicate, 1.0).ok());
  const std::vector<double> outside = {1.5};
  EXPECT_FALSE(BuildTimeline(CaseStudy(0.5), outside, 1.0).ok());
}

}  // namespace
}  // namespace pseudosync
