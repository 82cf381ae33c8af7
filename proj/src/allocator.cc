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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "absl/strings/str_format.h"

namespace pseudosync {

absl::Status UtilityParams::Validate() const {
  if (!(beta >= 0.0) || !(h_store >= 0.0) || !(r_penalty >= 0.0)) {
    return absl::InvalidArgumentError(
        "beta, storage cost and shortage penalty must be non-negative");
  }
  if (!std::isfinite(avg_entropy) || avg_entropy < 0.0) {
    return absl::InvalidArgumentError(
        "average entropy must be finite and non-negative");
  }
  return absl::OkStatus();
}

double RealizedUtility(int64_t r, int64_t d, const UtilityParams& params) {
  const double served = static_cast<double>(std::min(r, d));
  const double leftover = static_cast<double>(std::max<int64_t>(r - d, 0));
  const double unmet = static_cast<double>(std::max<int64_t>(d - r, 0));
  return params.UnitProfit() * served - params.h_store * leftover -
         params.r_penalty * unmet;
}

ExpectedUtilityCurve::ExpectedUtilityCurve(const DemandModel& model,
                                           const UtilityParams& params,
                                           double epsilon)
    : rate_(model.Rate()), params_(params) {
  const DemandPmf pmf = PoissonPmf(rate_, epsilon);
  cdf_.resize(pmf.probabilities.size());
  partial_mean_.resize(pmf.probabilities.size());
  double cdf = 0.0;
  double mean = 0.0;
  for (size_t d = 0; d < pmf.probabilities.size(); ++d) {
    cdf += pmf.probabilities[d];
    mean += static_cast<double>(d) * pmf.probabilities[d];
    cdf_[d] = cdf;
    partial_mean_[d] = mean;
  }
}

double ExpectedUtilityCurve::Cdf(int64_t r) const {
  if (r < 0) return 0.0;
  const size_t k = std::min<size_t>(static_cast<size_t>(r), cdf_.size() - 1);
  return cdf_[k];
}

double ExpectedUtilityCurve::Value(int64_t r) const {
  if (r <= 0) return -params_.r_penalty * rate_;
  // Demands d < r that the pmf resolves; everything else is d >= r.
  const size_t below = std::min<size_t>(static_cast<size_t>(r), cdf_.size());
  const double mass_below = cdf_[below - 1];
  const double mean_below = partial_mean_[below - 1];
  const double rd = static_cast<double>(r);
  const double served = mean_below + rd * (1.0 - mass_below);
  const double leftover = rd * mass_below - mean_below;
  const double unmet = rate_ - served;
  return params_.UnitProfit() * served - params_.h_store * leftover -
         params_.r_penalty * unmet;
}

double ExpectedUtilityCurve::Marginal(int64_t r) const {
  const double at_most = Cdf(r);
  return (params_.UnitProfit() + params_.r_penalty) * (1.0 - at_most) -
         params_.h_store * at_most;
}

double ExpectedUtility(int64_t r, const DemandModel& model,
                       const UtilityParams& params) {
  return ExpectedUtilityCurve(model, params).Value(r);
}

double MarginalGain(int64_t r, const DemandModel& model,
                    const UtilityParams& params) {
  return ExpectedUtilityCurve(model, params).Marginal(r);
}

absl::StatusOr<AllocationProblem> AllocationProblem::Create(
    std::vector<VmuDemand> vmus, int64_t budget) {
  AllocationProblem problem{std::move(vmus), budget};
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  return problem;
}

absl::Status AllocationProblem::Validate() const {
  if (vmus.empty()) {
    return absl::InvalidArgumentError("allocation needs at least one vehicle");
  }
  if (budget < 0) return absl::InvalidArgumentError("budget must be >= 0");
  for (size_t i = 0; i < vmus.size(); ++i) {
    if (absl::Status s = vmus[i].demand.Validate(); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("vehicle %d: %s", i, s.message()));
    }
    if (absl::Status s = vmus[i].utility.Validate(); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("vehicle %d: %s", i, s.message()));
    }
  }
  return absl::OkStatus();
}

int64_t BudgetFromRate(double theta, double period) {
  return static_cast<int64_t>(std::floor(theta * period));
}

int64_t AllocationPlan::Total() const {
  return std::accumulate(r.begin(), r.end(), int64_t{0});
}

double ExpectedObjective(const AllocationProblem& problem,
                         const AllocationPlan& plan) {
  double total = 0.0;
  for (size_t i = 0; i < problem.vmus.size(); ++i) {
    total += ExpectedUtility(plan.r[i], problem.vmus[i].demand,
                             problem.vmus[i].utility);
  }
  return total;
}

AllocationPlan OptimizeExact(const AllocationProblem& problem) {
  const size_t m = problem.vmus.size();
  std::vector<ExpectedUtilityCurve> curves;
  curves.reserve(m);
  for (const VmuDemand& vmu : problem.vmus) {
    curves.emplace_back(vmu.demand, vmu.utility);
  }
  AllocationPlan plan{std::vector<int64_t>(m, 0)};

  struct Candidate {
    double gain;
    size_t index;
  };
  auto worse = [](const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.index > b.index;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(
      worse);
  for (size_t i = 0; i < m; ++i) heap.push({curves[i].Marginal(0), i});

  for (int64_t granted = 0; granted < problem.budget; ++granted) {
    const Candidate best = heap.top();
    if (best.gain <= 0.0) break;
    heap.pop();
    const int64_t r = ++plan.r[best.index];
    heap.push({curves[best.index].Marginal(r), best.index});
  }
  return plan;
}

AllocationPlan EqualAllocation(const AllocationProblem& problem) {
  const int64_t m = static_cast<int64_t>(problem.vmus.size());
  return AllocationPlan{std::vector<int64_t>(m, problem.budget / m)};
}

}  // namespace pseudosync
