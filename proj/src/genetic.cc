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

#include "pseudosync/genetic.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_format.h"
#include "pseudosync/rng.h"

namespace pseudosync {
namespace {

struct Individual {
  std::vector<int64_t> genes;
  double fitness = 0.0;
};

class Fitness {
 public:
  explicit Fitness(const AllocationProblem& problem) {
    curves_.reserve(problem.vmus.size());
    for (const VmuDemand& vmu : problem.vmus) {
      curves_.emplace_back(vmu.demand, vmu.utility);
    }
  }

  double operator()(const std::vector<int64_t>& genes) const {
    double total = 0.0;
    for (size_t i = 0; i < genes.size(); ++i) total += curves_[i].Value(genes[i]);
    return total;
  }

 private:
  std::vector<ExpectedUtilityCurve> curves_;
};

std::vector<int64_t> RandomPlan(size_t m, int64_t budget, Rng& rng) {
  // Normalized exponentials are uniform on the simplex.
  std::vector<double> weights(m);
  double total = 0.0;
  for (double& w : weights) {
    w = rng.Exponential(1.0);
    total += w;
  }
  std::vector<int64_t> genes(m);
  for (size_t i = 0; i < m; ++i) {
    genes[i] = static_cast<int64_t>(weights[i] / total *
                                    static_cast<double>(budget));
  }
  return RepairPlan(std::move(genes), budget).r;
}

const Individual& Tournament(const std::vector<Individual>& population,
                             int size, Rng& rng) {
  size_t best = rng.UniformInt(population.size());
  for (int k = 1; k < size; ++k) {
    const size_t challenger = rng.UniformInt(population.size());
    const double a = population[challenger].fitness;
    const double b = population[best].fitness;
    if (a > b || (a == b && challenger < best)) best = challenger;
  }
  return population[best];
}

}  // namespace

absl::Status GaConfig::Validate() const {
  if (population < 2) {
    return absl::InvalidArgumentError("population must be at least 2");
  }
  if (generations < 1) {
    return absl::InvalidArgumentError("generations must be at least 1");
  }
  if (tournament_size < 1) {
    return absl::InvalidArgumentError("tournament size must be at least 1");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0) ||
      !(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    return absl::InvalidArgumentError("rates must lie in [0, 1]");
  }
  if (elitism < 0 || elitism >= population) {
    return absl::InvalidArgumentError(
        absl::StrFormat("elitism must lie in [0, %d)", population));
  }
  return absl::OkStatus();
}

AllocationPlan RepairPlan(std::vector<int64_t> genes, int64_t budget) {
  __int128 total = 0;
  for (int64_t& g : genes) {
    g = std::max<int64_t>(g, 0);
    total += g;
  }
  if (total > budget) {
    for (int64_t& g : genes) {
      g = static_cast<int64_t>(static_cast<__int128>(g) * budget / total);
    }
  }
  return AllocationPlan{std::move(genes)};
}

absl::StatusOr<AllocationPlan> OptimizeGa(const AllocationProblem& problem,
                                          const GaConfig& config,
                                          uint64_t seed) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  const size_t m = problem.vmus.size();
  if (problem.budget == 0) return AllocationPlan{std::vector<int64_t>(m, 0)};

  const Fitness fitness(problem);
  Rng rng(seed);

  std::vector<Individual> population;
  population.reserve(config.population);
  population.push_back({EqualAllocation(problem).r, 0.0});
  while (static_cast<int>(population.size()) < config.population) {
    population.push_back({RandomPlan(m, problem.budget, rng), 0.0});
  }
  for (Individual& ind : population) ind.fitness = fitness(ind.genes);
  Individual best = population.front();
  auto remember = [&best](const Individual& ind) {
    if (ind.fitness > best.fitness) best = ind;
  };
  for (const Individual& ind : population) remember(ind);

  auto by_fitness = [](const Individual& a, const Individual& b) {
    return a.fitness > b.fitness;
  };

  for (int gen = 0; gen < config.generations; ++gen) {
    std::stable_sort(population.begin(), population.end(), by_fitness);
    std::vector<Individual> next(population.begin(),
                                 population.begin() + config.elitism);
    while (static_cast<int>(next.size()) < config.population) {
      const Individual& mother =
          Tournament(population, config.tournament_size, rng);
      const Individual& father =
          Tournament(population, config.tournament_size, rng);
      std::vector<int64_t> genes = mother.genes;
      if (rng.Uniform() < config.crossover_rate) {
        for (size_t i = 0; i < m; ++i) {
          if (rng.Uniform() < 0.5) genes[i] = father.genes[i];
        }
      }
      for (size_t i = 0; i < m; ++i) {
        if (rng.Uniform() < config.mutation_rate) {
          const int64_t step = rng.Poisson(1.0);
          genes[i] += rng.Uniform() < 0.5 ? step : -step;
        }
      }
      Individual child{RepairPlan(std::move(genes), problem.budget).r, 0.0};
      child.fitness = fitness(child.genes);
      remember(child);
      next.push_back(std::move(child));
    }
    population = std::move(next);
  }
  return AllocationPlan{std::move(best.genes)};
}

}  // namespace pseudosync
