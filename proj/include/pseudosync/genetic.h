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

#ifndef PSEUDOSYNC_GENETIC_H_
#define PSEUDOSYNC_GENETIC_H_

#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pseudosync/allocator.h"

namespace pseudosync {

struct GaConfig {
  int population = 64;
  int generations = 200;
  int tournament_size = 3;
  double crossover_rate = 0.9;  // uniform crossover
  double mutation_rate = 0.05;  // per gene, step of +/- Poisson(1)
  int elitism = 2;

  absl::Status Validate() const;
  bool operator==(const GaConfig&) const = default;
};

// Clamps negative genes to zero and, when the total exceeds the budget,
// scales every gene by budget / total and rounds down.
AllocationPlan RepairPlan(std::vector<int64_t> genes, int64_t budget);

// Generation 0 holds the equal plan plus uniformly random full-budget plans,
// so with elitism the result never scores below EqualAllocation. The search
// is sequential and fully determined by `seed`.
absl::StatusOr<AllocationPlan> OptimizeGa(const AllocationProblem& problem,
                                          const GaConfig& config,
                                          uint64_t seed);

}  // namespace pseudosync

#endif  // PSEUDOSYNC_GENETIC_H_
