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

#include "pseudosync/allocator.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "pseudosync/demand.h"
#include "pseudosync/entropy.h"
#include "pseudosync/rng.h"
#include "test_oracles.h"

namespace pseudosync {
namespace {

UtilityParams CaseParams() {
  UtilityParams params;
  params.beta = 1.0;
  params.h_store = 0.1;
  params.r_penalty = 0.3;
  params.avg_entropy = 0.625;
  return params;
}

// Largest effect of dropping tail mass eps = 1e-9 on E[U(r, D)].
double TruncationBound(int64_t r, double rate, const UtilityParams& params) {
  const double slope = params.UnitProfit() + params.h_store + params.r_penalty;
  return 1e-9 * slope * (static_cast<double>(r) + rate + 50.0) + 1e-12;
}

TEST(RealizedUtilityTest, HandComputedValues) {
  EXPECT_NEAR(RealizedUtility(5, 5, CaseParams()), 3.125, 1e-12);
  EXPECT_NEAR(RealizedUtility(7, 5, CaseParams()), 2.925, 1e-12);
  EXPECT_NEAR(RealizedUtility(3, 5, CaseParams()), 1.275, 1e-12);
  EXPECT_NEAR(RealizedUtility(0, 0, CaseParams()), 0.0, 1e-12);
}

TEST(ExpectedUtilityTest, FrozenValues) {
  const DemandModel model{2.0, 1.0};
  EXPECT_NEAR(ExpectedUtility(2, model, CaseParams()), 0.695125338729888,
              1e-12);
  EXPECT_NEAR(ExpectedUtility(0, model, CaseParams()), -0.6, 1e-12);
}

TEST(ExpectedUtilityTest, MatchesDirectSummation) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const double rate = rng.Uniform() * 40.0;
    UtilityParams params = CaseParams();
    params.beta = rng.Uniform() * 3.0;
    params.h_store = rng.Uniform();
    params.r_penalty = rng.Uniform();
    const DemandModel model{rate, 1.0};
    for (int64_t r : {0, 1, 3, 10, 25, 60}) {
      EXPECT_NEAR(ExpectedUtility(r, model, params),
                  testing_oracles::ExpectedUtilityBySummation(r, rate, params),
                  TruncationBound(r, rate, params))
          << "rate=" << rate << " r=" << r;
    }
  }
}

TEST(ExpectedUtilityTest, SingleVmuOptimum) {
  const DemandModel model{5.0, 1.0};
  const std::vector<double> expected = {2.51937, 2.663132, 2.699838, 2.669634,
                                        2.602258};
  for (int r = 6; r <= 10; ++r) {
    EXPECT_NEAR(ExpectedUtility(r, model, CaseParams()), expected[r - 6], 1e-6);
  }
  absl::StatusOr<AllocationProblem> problem =
      AllocationProblem::Create({VmuDemand{model, CaseParams()}}, 100);
  ASSERT_TRUE(problem.ok());
  EXPECT_EQ(OptimizeExact(*problem).r, std::vector<int64_t>{8});
}

TEST(ExpectedUtilityTest, MarginalMatchesFiniteDifference) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const DemandModel model{rng.Uniform() * 100.0, 1.0};
    UtilityParams params = CaseParams();
    params.avg_entropy = 0.25 + rng.Uniform();
    for (int64_t r = 0; r < 150; r += 7) {
      EXPECT_NEAR(MarginalGain(r, model, params),
                  ExpectedUtility(r + 1, model, params) -
                      ExpectedUtility(r, model, params),
                  1e-9);
    }
  }
}

TEST(ExpectedUtilityTest, SecondDifferencesNonPositive) {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const double rate = rng.Uniform() * 150.0;
    const DemandModel model{rate, 1.0};
    UtilityParams params = CaseParams();
    params.beta = rng.Uniform() * 2.0;
    const ExpectedUtilityCurve curve(model, params);
    const int64_t top = static_cast<int64_t>(3 * rate) + 50;
    for (int64_t r = 1; r < top; ++r) {
      EXPECT_LE(curve.Value(r + 1) - 2 * curve.Value(r) + curve.Value(r - 1),
                1e-9);
    }
  }
}

TEST(AllocationProblemTest, Validation) {
  EXPECT_FALSE(AllocationProblem::Create({}, 10).ok());
  EXPECT_FALSE(
      AllocationProblem::Create({VmuDemand{{1.0, 1.0}, CaseParams()}}, -1).ok());
  UtilityParams bad = CaseParams();
  bad.h_store = -1.0;
  EXPECT_FALSE(AllocationProblem::Create({VmuDemand{{1.0, 1.0}, bad}}, 5).ok());
}

TEST(AllocatorTest, BudgetFromRate) {
  EXPECT_EQ(BudgetFromRate(10.0, 60.0), 600);
  EXPECT_EQ(BudgetFromRate(2.5, 3.0), 7);
}

TEST(AllocatorTest, ExactMatchesEnumeration) {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const AllocationProblem problem = testing_oracles::RandomSmallProblem(rng);
    const AllocationPlan plan = OptimizeExact(problem);
    EXPECT_LE(plan.Total(), problem.budget);
    EXPECT_NEAR(ExpectedObjective(problem, plan),
                testing_oracles::EnumerateBestObjective(problem), 1e-9);
  }
}

TEST(AllocatorTest, ExactStopsAtUnconstrainedOptimum) {
  const DemandModel model{5.0, 1.0};
  absl::StatusOr<AllocationProblem> problem = AllocationProblem::Create(
      {VmuDemand{model, CaseParams()}, VmuDemand{model, CaseParams()}}, 1000);
  ASSERT_TRUE(problem.ok());
  EXPECT_EQ(OptimizeExact(*problem).r, (std::vector<int64_t>{8, 8}));
}

TEST(AllocatorTest, EqualAllocationSplitsBudget) {
  const DemandModel model{1.0, 1.0};
  absl::StatusOr<AllocationProblem> problem = AllocationProblem::Create(
      {VmuDemand{model, CaseParams()}, VmuDemand{model, CaseParams()},
       VmuDemand{model, CaseParams()}},
      10);
  ASSERT_TRUE(problem.ok());
  EXPECT_EQ(EqualAllocation(*problem).r, (std::vector<int64_t>{3, 3, 3}));
}

TEST(AllocatorTest, ExactDominatesEqual) {
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const AllocationProblem problem = testing_oracles::RandomSmallProblem(rng);
    EXPECT_GE(ExpectedObjective(problem, OptimizeExact(problem)),
              ExpectedObjective(problem, EqualAllocation(problem)) - 1e-12);
  }
}

TEST(RealizedUtilityTest, MaximizedAtDemand) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    UtilityParams params = CaseParams();
    params.beta = rng.Uniform() * 3.0;
    params.avg_entropy = rng.Uniform() * 1.5;
    params.h_store = rng.Uniform();
    params.r_penalty = rng.Uniform();
    const int64_t d = static_cast<int64_t>(rng.UniformInt(50));
    const double at_d = RealizedUtility(d, d, params);
    for (int64_t r = 0; r <= 100; ++r) {
      EXPECT_LE(RealizedUtility(r, d, params), at_d + 1e-12);
    }
  }
}

TEST(ExpectedUtilityTest, ZeroRateIsStorageCost) {
  for (int64_t r : {0, 1, 7, 250}) {
    EXPECT_NEAR(ExpectedUtility(r, DemandModel{0.0, 60.0}, CaseParams()),
                -0.1 * static_cast<double>(r), 1e-12);
  }
}

TEST(ExpectedUtilityTest, MatchesMonteCarlo) {
  const DemandModel model{2.0, 1.0};
  const int n = 10000000;
  Rng rng(37);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = RealizedUtility(2, SampleDemand(model, rng), CaseParams());
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_NEAR(ExpectedUtility(2, model, CaseParams()), mean, 3.0 * se);
}

TEST(ExpectedUtilityTest, MarginalLimits) {
  const UtilityParams params = CaseParams();
  // Both limits hold up to the 1e-9 tail mass dropped from the pmf.
  EXPECT_NEAR(MarginalGain(200, DemandModel{2.0, 1.0}, params), -0.1, 1e-9);
  EXPECT_NEAR(MarginalGain(0, DemandModel{100.0, 1.0}, params),
              params.UnitProfit() + params.r_penalty, 1e-9);
}

TEST(AllocatorTest, TwoVmuCaseMatchesEnumeration) {
  absl::StatusOr<AllocationProblem> problem = AllocationProblem::Create(
      {VmuDemand{{2.0, 1.0}, CaseParams()}, VmuDemand{{8.0, 1.0}, CaseParams()}},
      8);
  ASSERT_TRUE(problem.ok());
  AllocationPlan best;
  const double best_value =
      testing_oracles::EnumerateBestObjective(*problem, &best);
  const AllocationPlan plan = OptimizeExact(*problem);
  EXPECT_EQ(plan.r, best.r);
  EXPECT_NEAR(ExpectedObjective(*problem, plan), best_value, 1e-12);
}

TEST(AllocatorTest, ZeroBudgetGivesZeros) {
  absl::StatusOr<AllocationProblem> problem = AllocationProblem::Create(
      {VmuDemand{{2.0, 1.0}, CaseParams()}, VmuDemand{{8.0, 1.0}, CaseParams()}},
      0);
  ASSERT_TRUE(problem.ok());
  EXPECT_EQ(OptimizeExact(*problem).r, (std::vector<int64_t>{0, 0}));
  EXPECT_EQ(EqualAllocation(*problem).r, (std::vector<int64_t>{0, 0}));
}

TEST(AllocatorTest, EqualAllocationFloorsAndWithholds) {
  const DemandModel model{1.0, 1.0};
  std::vector<VmuDemand> three(3, VmuDemand{model, CaseParams()});
  EXPECT_EQ(EqualAllocation(*AllocationProblem::Create(three, 7)).r,
            (std::vector<int64_t>{2, 2, 2}));
  std::vector<VmuDemand> six(6, VmuDemand{model, CaseParams()});
  EXPECT_EQ(EqualAllocation(*AllocationProblem::Create(six, 600)).r,
            std::vector<int64_t>(6, 100));
}

TEST(AllocatorTest, OptimumNonDecreasingInBudget) {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    AllocationProblem problem = testing_oracles::RandomSmallProblem(rng);
    double previous = -INFINITY;
    for (int64_t budget = 0; budget <= 30; ++budget) {
      problem.budget = budget;
      const double value = ExpectedObjective(problem, OptimizeExact(problem));
      EXPECT_GE(value, previous - 1e-12);
      previous = value;
    }
  }
}

}  // namespace
}  // namespace pseudosync
