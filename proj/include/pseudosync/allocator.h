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

// Single-period pseudonym distribution as a newsvendor problem.
//
// At the start of a period the RSU hands vehicle i a stock of r_i pseudonyms.
// Over the period the vehicle wants D_i ~ Poisson(f_i * T) changes. Its utility
// is
//
//   U(r, D) = beta * H_avg * min(r, D) - h * (r - D)^+ - r_pen * (D - r)^+
//
// i.e. a per-change privacy profit, a storage cost for leftovers and a penalty
// for unmet changes. The RSU maximizes sum_i E[U_i] subject to
// sum_i r_i <= budget. Each E[U_i] is concave in r_i, so the greedy that keeps
// granting one pseudonym to the best positive marginal is exact.

#ifndef PSEUDOSYNC_ALLOCATOR_H_
#define PSEUDOSYNC_ALLOCATOR_H_

#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pseudosync/demand.h"

namespace pseudosync {

struct UtilityParams {
  double beta = 1.0;         // profit per change per entropy bit
  double h_store = 0.1;      // cost per leftover pseudonym
  double r_penalty = 0.3;    // cost per unmet change
  double avg_entropy = 0.0;  // bits, at the vehicle's nominal change cadence

  absl::Status Validate() const;
  double UnitProfit() const { return beta * avg_entropy; }
};

double RealizedUtility(int64_t r, int64_t d, const UtilityParams& params);

// E[U(r, D)] for D ~ Poisson with masses from ComputeDemandPmf (tolerance
// kDefaultTailTolerance). Mass beyond the truncation point is treated as
// demand exceeding r.
double ExpectedUtility(int64_t r, const DemandModel& model,
                       const UtilityParams& params);

// E[U(r + 1)] - E[U(r)] in closed form:
//   (beta * H_avg + r_pen) * P(D > r) - h * P(D <= r).
double MarginalGain(int64_t r, const DemandModel& model,
                    const UtilityParams& params);

// Expected utility of one vehicle as a function of its stock, with O(1)
// evaluation after an O(N) precomputation over the truncated pmf.
class ExpectedUtilityCurve {
 public:
  ExpectedUtilityCurve(const DemandModel& model, const UtilityParams& params,
                       double epsilon = kDefaultTailTolerance);

  double Value(int64_t r) const;
  double Marginal(int64_t r) const;
  // P(D <= r) under the truncated pmf.
  double Cdf(int64_t r) const;

 private:
  double rate_;
  UtilityParams params_;
  std::vector<double> cdf_;          // sum_{d <= k} P(d)
  std::vector<double> partial_mean_; // sum_{d <= k} d P(d)
};

struct VmuDemand {
  DemandModel demand;
  UtilityParams utility;
};

struct AllocationProblem {
  std::vector<VmuDemand> vmus;
  int64_t budget = 0;

  static absl::StatusOr<AllocationProblem> Create(std::vector<VmuDemand> vmus,
                                                  int64_t budget);
  absl::Status Validate() const;
};

// floor(theta * period), the pseudonyms an RSU receives over one period.
int64_t BudgetFromRate(double theta, double period);

struct AllocationPlan {
  std::vector<int64_t> r;

  int64_t Total() const;
  bool operator==(const AllocationPlan&) const = default;
};

double ExpectedObjective(const AllocationProblem& problem,
                         const AllocationPlan& plan);

// Greedy on marginal gains; ties go to the lowest vehicle index.
AllocationPlan OptimizeExact(const AllocationProblem& problem);

// floor(budget / m) to every vehicle; the remainder is withheld.
AllocationPlan EqualAllocation(const AllocationProblem& problem);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_ALLOCATOR_H_
