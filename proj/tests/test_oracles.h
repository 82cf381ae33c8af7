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

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the closed forms or optimizers under test except
// where a routine is explicitly checked against another route.

#ifndef PSEUDOSYNC_TESTS_TEST_ORACLES_H_
#define PSEUDOSYNC_TESTS_TEST_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "pseudosync/allocator.h"
#include "pseudosync/entropy.h"
#include "pseudosync/rng.h"

namespace pseudosync::testing_oracles {

// Sawtooth value written out directly: decay from h_max - p*h_0 at slope
// alpha, clamped to h_min.
inline double SawtoothValue(const EntropyParams& params, double t) {
  const double reset = params.h_max - params.p * params.h_0;
  return std::max(params.h_min, reset - params.alpha * t);
}

// Composite trapezoid rule over [0, tau] divided by tau.
inline double TrapezoidAverageEntropy(const EntropyParams& params, double tau,
                                      int steps) {
  const double h = tau / steps;
  double sum = 0.5 * (SawtoothValue(params, 0.0) + SawtoothValue(params, tau));
  for (int k = 1; k < steps; ++k) sum += SawtoothValue(params, k * h);
  return sum * h / tau;
}

inline EntropyParams RandomEntropyParams(Rng& rng) {
  EntropyParams params;
  params.h_min = rng.Uniform() * 0.5;
  params.h_max = params.h_min + 0.1 + rng.Uniform() * 3.0;
  params.p = rng.UniformOpenLow();
  // Keep the reset level inside [h_min, h_max].
  params.h_0 = rng.Uniform() * (params.h_max - params.h_min) / params.p;
  params.alpha = rng.Uniform() < 0.05 ? 0.0 : rng.Uniform() * 3.0;
  return params;
}

// Poisson mass by the factorial formula, for small rates only.
inline double PoissonMassByFactorial(double rate, int k) {
  double factorial = 1.0;
  for (int i = 2; i <= k; ++i) factorial *= i;
  return std::exp(-rate) * std::pow(rate, k) / factorial;
}

// E[U(r, D)] by summing the realized utility against factorial-formula masses
// out to a far tail (rate <= 50).
inline double ExpectedUtilityBySummation(int64_t r, double rate,
                                         const UtilityParams& params) {
  double total = 0.0;
  double mass = std::exp(-rate);
  for (int d = 0; d < 400; ++d) {
    if (d > 0) mass *= rate / d;
    const double served = static_cast<double>(std::min<int64_t>(r, d));
    const double leftover = static_cast<double>(std::max<int64_t>(r - d, 0));
    const double unmet = static_cast<double>(std::max<int64_t>(d - r, 0));
    total += mass * (params.beta * params.avg_entropy * served -
                     params.h_store * leftover - params.r_penalty * unmet);
  }
  return total;
}

// Exhaustive search over every plan with sum(r) <= budget.
inline double EnumerateBestObjective(const AllocationProblem& problem,
                                     AllocationPlan* best_plan = nullptr) {
  const size_t m = problem.vmus.size();
  std::vector<std::vector<double>> tables(m);
  for (size_t i = 0; i < m; ++i) {
    for (int64_t r = 0; r <= problem.budget; ++r) {
      tables[i].push_back(ExpectedUtility(r, problem.vmus[i].demand,
                                          problem.vmus[i].utility));
    }
  }
  double best = -INFINITY;
  std::vector<int64_t> current(m, 0);
  std::function<void(size_t, int64_t, double)> recurse =
      [&](size_t i, int64_t left, double value) {
        if (i == m) {
          if (value > best) {
            best = value;
            if (best_plan) best_plan->r = current;
          }
          return;
        }
        for (int64_t r = 0; r <= left; ++r) {
          current[i] = r;
          recurse(i + 1, left - r, value + tables[i][r]);
        }
        current[i] = 0;
      };
  recurse(0, problem.budget, 0.0);
  return best;
}

// Random small allocation instance: m <= 3 vehicles, budget <= 15.
inline AllocationProblem RandomSmallProblem(Rng& rng) {
  AllocationProblem problem;
  const int m = 1 + static_cast<int>(rng.UniformInt(3));
  problem.budget = static_cast<int64_t>(rng.UniformInt(16));
  for (int i = 0; i < m; ++i) {
    VmuDemand vmu;
    vmu.demand = DemandModel{rng.Uniform() * 3.0, 1.0 + rng.Uniform() * 3.0};
    vmu.utility.beta = rng.Uniform() * 2.0;
    vmu.utility.h_store = rng.Uniform() * 0.5;
    vmu.utility.r_penalty = rng.Uniform() * 1.0;
    vmu.utility.avg_entropy = 0.25 + rng.Uniform() * 1.25;
    problem.vmus.push_back(vmu);
  }
  return problem;
}

}  // namespace pseudosync::testing_oracles

#endif  // PSEUDOSYNC_TESTS_TEST_ORACLES_H_
