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
#include <vector>

#include "gtest/gtest.h"
#include "pseudosync/rng.h"
#include "test_oracles.h"

namespace pseudosync {
namespace {

TEST(DemandModelTest, Validation) {
  EXPECT_TRUE(DemandModel::Create(1.0, 60.0).ok());
  EXPECT_TRUE(DemandModel::Create(0.0, 60.0).ok());
  EXPECT_FALSE(DemandModel::Create(-1.0, 60.0).ok());
  EXPECT_FALSE(DemandModel::Create(1.0, 0.0).ok());
  EXPECT_FALSE(DemandModel::Create(NAN, 1.0).ok());
}

TEST(DemandPmfTest, SmallRateMatchesFactorialFormula) {
  absl::StatusOr<DemandPmf> pmf = ComputeDemandPmf(DemandModel{1.0, 2.0});
  ASSERT_TRUE(pmf.ok());
  EXPECT_NEAR(pmf->probabilities[0], 0.1353352832366127, 1e-15);
  for (int k = 0; k <= pmf->truncation_count(); ++k) {
    EXPECT_NEAR(pmf->probabilities[k],
                testing_oracles::PoissonMassByFactorial(2.0, k), 1e-14);
  }
  EXPECT_EQ(pmf->truncation_count(), 15);
}

TEST(DemandPmfTest, ZeroRate) {
  absl::StatusOr<DemandPmf> pmf = ComputeDemandPmf(DemandModel{0.0, 60.0});
  ASSERT_TRUE(pmf.ok());
  ASSERT_EQ(pmf->probabilities.size(), 1u);
  EXPECT_EQ(pmf->probabilities[0], 1.0);
}

TEST(DemandPmfTest, RejectsBadTolerance) {
  EXPECT_FALSE(ComputeDemandPmf(DemandModel{1.0, 1.0}, 0.0).ok());
  EXPECT_FALSE(ComputeDemandPmf(DemandModel{1.0, 1.0}, 1.0).ok());
}

TEST(DemandPmfTest, MassAndMeanAcrossRates) {
  for (double rate : {0.5, 2.0, 5.0, 20.0, 60.0, 120.0, 204.0, 500.0}) {
    const double eps = 1e-9;
    const DemandPmf pmf = PoissonPmf(rate, eps);
    double total = 0.0;
    for (double p : pmf.probabilities) {
      EXPECT_GE(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total + pmf.truncation_mass, 1.0, 1e-12) << rate;
    EXPECT_LE(pmf.truncation_mass, eps) << rate;
    EXPECT_LE(std::abs(rate - pmf.Mean()),
              eps * static_cast<double>(pmf.truncation_count()) + 1e-9)
        << rate;
  }
}

TEST(DemandSampleTest, SeededSamplingIsDeterministic) {
  const DemandModel model{1.4, 60.0};
  EXPECT_EQ(SampleDemand(model, 42), SampleDemand(model, 42));
}

TEST(DemandSampleTest, EmpiricalMeanAndVariance) {
  for (double rate : {0.7, 12.0, 84.0, 800.0}) {
    Rng rng(DeriveSeed(3, "demand", static_cast<uint64_t>(rate * 10)));
    const int n = 20000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = static_cast<double>(
          SampleDemand(DemandModel{rate, 1.0}, rng));
      sum += d;
      sum_sq += d * d;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    EXPECT_NEAR(mean, rate, 5.0 * std::sqrt(rate / n)) << rate;
    EXPECT_NEAR(var / rate, 1.0, 0.06) << rate;
  }
}

TEST(DemandSampleTest, ArrivalTimesInsidePeriodAndSorted) {
  Rng rng(5);
  const DemandModel model{2.0, 60.0};
  double total = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> times = SampleArrivalTimes(model, rng);
    for (size_t i = 0; i < times.size(); ++i) {
      EXPECT_GE(times[i], 0.0);
      EXPECT_LT(times[i], 60.0);
      if (i > 0) EXPECT_LE(times[i - 1], times[i]);
    }
    total += static_cast<double>(times.size());
  }
  EXPECT_NEAR(total / 200.0, 120.0, 5.0 * std::sqrt(120.0 / 200.0));
}

TEST(EstimateFrequencyTest, CountsWithinWindow) {
  const std::vector<double> times = {0.5, 1.0, 1.5, 2.0};
  absl::StatusOr<double> f = EstimateFrequency(times, 2.0);
  ASSERT_TRUE(f.ok());
  EXPECT_DOUBLE_EQ(*f, 2.0);
  EXPECT_FALSE(EstimateFrequency(times, 0.0).ok());
}

TEST(DemandPmfTest, MatchesFactorialFormulaUpToRate20) {
  for (double rate = 0.25; rate <= 20.0; rate += 0.25) {
    const DemandPmf pmf = PoissonPmf(rate, kDefaultTailTolerance);
    for (int k = 0; k <= pmf.truncation_count(); ++k) {
      ASSERT_NEAR(pmf.probabilities[k],
                  testing_oracles::PoissonMassByFactorial(rate, k), 1e-10)
          << "rate " << rate << " k " << k;
    }
  }
}

TEST(DemandPmfTest, ZeroMassAtRateTwo) {
  absl::StatusOr<DemandPmf> pmf = ComputeDemandPmf(DemandModel{2.0, 1.0}, 1e-9);
  ASSERT_TRUE(pmf.ok());
  EXPECT_NEAR(pmf->probabilities[0], std::exp(-2.0), 1e-9);
}

TEST(DemandSampleTest, ZeroFrequencyAlwaysZero) {
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    EXPECT_EQ(SampleDemand(DemandModel{0.0, 60.0}, seed), 0);
  }
}

TEST(DemandSampleTest, MeanOverSeedsAtUnitFrequency) {
  const int n = 100000;
  double sum = 0.0;
  for (int seed = 0; seed < n; ++seed) {
    sum += static_cast<double>(SampleDemand(DemandModel{1.0, 60.0}, seed));
  }
  EXPECT_NEAR(sum / n, 60.0, 3.0 * std::sqrt(60.0) / std::sqrt(n));
}

TEST(DemandSampleTest, VarianceAtDoubleFrequency) {
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int seed = 0; seed < n; ++seed) {
    const double d =
        static_cast<double>(SampleDemand(DemandModel{2.0, 60.0}, seed));
    sum += d;
    sum_sq += d * d;
  }
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1);
  EXPECT_NEAR(var, 120.0, 0.05 * 120.0);
}

// Upper 0.001 quantile of chi-square with k degrees of freedom by the
// Wilson-Hilferty cube approximation.
double ChiSquareCritical001(int k) {
  const double z = 3.090232306167813;
  const double c = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - c + z * std::sqrt(c), 3.0);
}

TEST(DemandSampleTest, ChiSquareAgainstPmf) {
  for (double rate : {3.0, 60.0}) {
    const DemandModel model{rate, 1.0};
    const int n = 100000;
    const DemandPmf pmf = PoissonPmf(rate, 1e-12);
    std::vector<int64_t> counts(pmf.probabilities.size() + 1, 0);
    Rng rng(DeriveSeed(17, "chi-square", static_cast<uint64_t>(rate)));
    for (int i = 0; i < n; ++i) {
      const int64_t d = SampleDemand(model, rng);
      counts[std::min<int64_t>(d, pmf.truncation_count() + 1)]++;
    }
    // Merge cells from both ends until each expected count reaches 5.
    std::vector<double> expected, observed;
    double e_acc = 0.0, o_acc = 0.0;
    for (size_t k = 0; k < counts.size(); ++k) {
      e_acc += n * (k < pmf.probabilities.size() ? pmf.probabilities[k]
                                                 : pmf.truncation_mass);
      o_acc += static_cast<double>(counts[k]);
      if (e_acc >= 5.0) {
        expected.push_back(e_acc);
        observed.push_back(o_acc);
        e_acc = o_acc = 0.0;
      }
    }
    expected.back() += e_acc;
    observed.back() += o_acc;
    double chi2 = 0.0;
    for (size_t k = 0; k < expected.size(); ++k) {
      chi2 += (observed[k] - expected[k]) * (observed[k] - expected[k]) /
              expected[k];
    }
    const int dof = static_cast<int>(expected.size()) - 1;
    EXPECT_LT(chi2, ChiSquareCritical001(dof)) << "rate " << rate;
  }
}

TEST(EstimateFrequencyTest, SpecifiedCounts) {
  std::vector<double> times;
  for (int i = 0; i < 90; ++i) times.push_back((i + 0.5) * 60.0 / 90.0);
  EXPECT_DOUBLE_EQ(*EstimateFrequency(times, 60.0), 1.5);
  times.resize(60);
  for (int i = 0; i < 60; ++i) times[i] = i + 0.5;
  EXPECT_DOUBLE_EQ(*EstimateFrequency(times, 60.0), 1.0);
  EXPECT_DOUBLE_EQ(*EstimateFrequency({}, 60.0), 0.0);
}

}  // namespace
}  // namespace pseudosync
