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

// Acceptance suite. Prints one PASS/FAIL line per criterion with the pinned
// tolerance and the measured values, and exits non-zero if any criterion
// fails. Optional arguments select criteria by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "pseudosync/adversary.h"
#include "pseudosync/allocator.h"
#include "pseudosync/config.h"
#include "pseudosync/entropy.h"
#include "pseudosync/experiments.h"
#include "pseudosync/genetic.h"
#include "pseudosync/ledger.h"
#include "pseudosync/report.h"
#include "pseudosync/rng.h"
#include "pseudosync/sim.h"
#include "test_oracles.h"

namespace pseudosync {
namespace {

namespace oracles = testing_oracles;

struct Verdict {
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::string Mark(bool ok) { return ok ? "ok" : "FAILED"; }

Verdict Criterion1() {
  const Stopwatch clock;
  absl::StatusOr<RunConfig> config = LoadPreset("paper_fig5a");
  if (!config.ok()) return {false, std::string(config.status().message())};
  const int n = 30;
  absl::StatusOr<Fig5aResult> result =
      RunFig5a(config->scenario, SeedRange(1, n));
  if (!result.ok()) return {false, std::string(result.status().message())};
  const double seconds = clock.Seconds();
  const bool a = result->seeds_mean_improved == n;
  const int needed_b = static_cast<int>(std::ceil(0.95 * n));
  const bool b = result->seeds_every_vmu_dominates >= needed_b;
  const std::string table = ToTable(*result);
  const bool c =
      table.find(absl::StrFormat("achieved improvement: %.1f%%",
                                 result->improvement_percent)) !=
          std::string::npos &&
      table.find("reference improvement: 33.8%") != std::string::npos;
  const bool fast = seconds <= 60.0;
  return {a && b && c && fast,
          absl::StrFormat(
              "%d seeds, realized utility; (a) mean improved on %d/%d seeds, "
              "need all [%s]; (b) every VMU on-demand >= equal on %d/%d seeds, "
              "need >= %d [%s] (expected-utility mode: %d/%d); (c) printed "
              "improvement %.1f%% vs reference 33.8%% [%s] (expected-utility "
              "mode %.1f%%); runtime %.1fs <= 60s [%s]",
              n, result->seeds_mean_improved, n, Mark(a),
              result->seeds_every_vmu_dominates, n, needed_b, Mark(b),
              result->expected_seeds_every_vmu_dominates, n,
              result->improvement_percent, Mark(c),
              result->expected_improvement_percent, seconds, Mark(fast))};
}

Verdict Criterion2() {
  const Stopwatch clock;
  absl::StatusOr<RunConfig> config = LoadPreset("paper_fig5b");
  if (!config.ok()) return {false, std::string(config.status().message())};
  const ExperimentSpec& spec = config->experiment;
  const int seeds = std::max(spec.seeds, 10);
  absl::StatusOr<Fig5bResult> result =
      RunFig5b(config->scenario, CaseStudyGroups(), spec.betas,
               SeedRange(spec.first_seed, seeds));
  if (!result.ok()) return {false, std::string(result.status().message())};
  const double seconds = clock.Seconds();
  const bool grid = spec.betas.size() >= 5;
  const bool cells =
      result->cells_passing >= std::ceil(0.95 * result->cells_total);
  const bool fast = seconds <= 60.0;
  return {grid && cells && fast,
          absl::StrFormat("%d betas x %d seeds; cells with g3 > g2 > g1 and "
                          "no decrease in beta: %d/%d, need >= 95%% [%s]; "
                          "runtime %.1fs <= 60s [%s]",
                          spec.betas.size(), seeds, result->cells_passing,
                          result->cells_total, Mark(cells), seconds,
                          Mark(fast))};
}

Verdict Criterion3() {
  const Stopwatch clock;
  Rng rng(DeriveSeed(2026, "acceptance-3"));
  const int instances = 200;
  int exact_matches = 0;
  int ga_close = 0;
  for (int i = 0; i < instances; ++i) {
    const AllocationProblem problem = oracles::RandomSmallProblem(rng);
    const double best = oracles::EnumerateBestObjective(problem);
    const double exact = ExpectedObjective(problem, OptimizeExact(problem));
    if (std::abs(exact - best) <= 1e-9 * std::max(1.0, std::abs(best))) {
      ++exact_matches;
    }
    absl::StatusOr<AllocationPlan> ga =
        OptimizeGa(problem, GaConfig{}, DeriveSeed(2026, "acceptance-3-ga", i));
    if (ga.ok() &&
        exact - ExpectedObjective(problem, *ga) <= 0.01 * std::abs(exact)) {
      ++ga_close;
    }
  }
  const double seconds = clock.Seconds();
  const bool exact_ok = exact_matches == instances;
  const bool ga_ok = ga_close >= std::ceil(0.95 * instances);
  const bool fast = seconds <= 120.0;
  return {exact_ok && ga_ok && fast,
          absl::StrFormat(
              "exact == enumeration (1e-9 rel) on %d/%d [%s]; GA within 1%% "
              "of exact on %d/%d, need >= 95%% [%s]; runtime %.1fs <= 120s "
              "[%s]",
              exact_matches, instances, Mark(exact_ok), ga_close, instances,
              Mark(ga_ok), seconds, Mark(fast))};
}

Verdict Criterion4() {
  Rng rng(DeriveSeed(2026, "acceptance-4"));
  double worst = -INFINITY;
  int64_t points = 0;
  for (int draw = 0; draw < 500; ++draw) {
    UtilityParams params;
    params.beta = rng.Uniform() * 3.0;
    params.avg_entropy = 0.25 + rng.Uniform() * 1.25;
    params.h_store = rng.Uniform();
    params.r_penalty = rng.Uniform() * 2.0;
    const DemandModel model{rng.Uniform() * 3.0, 1.0 + rng.Uniform() * 59.0};
    const double rate = model.Rate();
    const int64_t top = static_cast<int64_t>(std::ceil(3.0 * rate + 50.0));
    std::vector<double> values;
    for (int64_t r = 0; r <= top + 2; ++r) {
      values.push_back(ExpectedUtility(r, model, params));
    }
    for (int64_t r = 0; r <= top; ++r) {
      worst = std::max(worst, values[r + 2] - 2.0 * values[r + 1] + values[r]);
      ++points;
    }
  }
  const bool ok = worst <= 1e-9;
  return {ok, absl::StrFormat("500 draws, %d second differences over r in "
                              "[0, 3*lambda+50]; max %.3g <= 1e-9",
                              points, worst)};
}

Verdict Criterion5() {
  Rng rng(DeriveSeed(2026, "acceptance-5"));
  double worst = 0.0;
  double worst_branch = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    const EntropyParams params = oracles::RandomEntropyParams(rng);
    const double tau = 0.01 + rng.Uniform() * 5.0;
    const double closed = *AverageEntropy(params, tau);
    const double numeric =
        oracles::TrapezoidAverageEntropy(params, tau, 1000000);
    worst = std::max(worst, std::abs(closed - numeric));
    const double t_f = DecayTime(params);
    if (std::isfinite(t_f) && t_f > 0.0) {
      const double linear = ResetLevel(params) - params.alpha * t_f / 2.0;
      worst_branch = std::max(
          {worst_branch, std::abs(*AverageEntropy(params, t_f) - linear),
           std::abs(*AverageEntropy(params, std::nextafter(t_f, 1e300)) -
                    linear),
           std::abs(*AverageEntropy(params, std::nextafter(t_f, 0.0)) -
                    linear)});
    }
  }
  const bool ok = worst <= 1e-6 && worst_branch <= 1e-12;
  return {ok, absl::StrFormat("1000 draws vs trapezoid (1e6 steps): max |diff| "
                              "%.3g <= 1e-6; branch gap at t_f %.3g <= 1e-12",
                              worst, worst_branch)};
}

Verdict Criterion6() {
  const Stopwatch clock;
  const TrackRecord fig3 = TrackingFraction(
      BuildCadenceTrace(CadenceScenario{}),
      AttackerConfig{Observability::Global(), DeriveSeed(2026, "fig3")});
  const bool fig3_ok = fig3.tracked_fraction == 1.0;
  std::string detail = absl::StrFormat(
      "async full observability tracked_fraction %.17g == 1 [%s]",
      fig3.tracked_fraction, Mark(fig3_ok));
  bool ok = fig3_ok;
  const size_t k = 6;
  const int replays = 100000;
  for (size_t g : {2, 4, 8}) {
    const ScenarioTrace trace = BuildSynchronousGroupTrace(g, k);
    int survived = 0;
    for (int replay = 0; replay < replays; ++replay) {
      const TrackRecord record = TrackingFraction(
          trace, AttackerConfig{Observability::Global(),
                                DeriveSeed(2026, "replay", g * replays + replay)});
      if (record.boundaries.size() == k && record.boundaries[k - 1].reidentified) {
        ++survived;
      }
    }
    const double p = std::pow(static_cast<double>(g), -static_cast<double>(k));
    const double sigma = std::sqrt(p * (1.0 - p) / replays);
    const double rate = static_cast<double>(survived) / replays;
    const bool within = std::abs(rate - p) <= 3.0 * sigma;
    ok = ok && within;
    detail += absl::StrFormat("; G=%d survival %.3g vs %.3g +- %.2g [%s]", g,
                              rate, p, 3.0 * sigma, Mark(within));
  }
  const double seconds = clock.Seconds();
  const bool fast = seconds <= 60.0;
  detail += absl::StrFormat("; runtime %.1fs <= 60s [%s]", seconds, Mark(fast));
  return {ok && fast, detail};
}

ScenarioConfig RandomSafetyScenario(uint64_t index) {
  Rng rng(DeriveSeed(2026, "acceptance-7", index));
  ScenarioConfig config;
  config.rsu_count = 3 + static_cast<int>(rng.UniformInt(4));
  config.coverage = 10.0;
  config.period = 60.0;
  config.mode = rng.Uniform() < 0.8 ? SyncMode::kSynchronous
                                    : SyncMode::kAsynchronous;
  config.scheme = rng.Uniform() < 0.5 ? AllocationScheme::kOnDemand
                                      : AllocationScheme::kEqual;
  const double deltas[] = {0.5, 1.0, 2.0};
  config.delta_sync = deltas[rng.UniformInt(3)];
  const double speeds[] = {0.0, 0.5, -0.5, 1.0, -1.0};
  const int m = 4 + static_cast<int>(rng.UniformInt(7));
  const int clusters = 1 + static_cast<int>(rng.UniformInt(3));
  for (int i = 0; i < m; ++i) {
    VmuSpec vmu;
    const int cluster = static_cast<int>(rng.UniformInt(clusters));
    vmu.position = std::fmod(cluster * 10.0 + 1.0 + rng.Uniform() * 3.0,
                             config.RoadLength());
    vmu.velocity = speeds[rng.UniformInt(5)];
    vmu.frequency = 0.5 + rng.Uniform() * 2.5;
    config.vmus.push_back(vmu);
  }
  if (rng.Uniform() < 0.5) {
    config.rogue_vts = {static_cast<int>(rng.UniformInt(m))};
    config.misbehavior_time = 5.0 + rng.Uniform() * 50.0;
  }
  config.ga.generations = 50;
  config.seed = DeriveSeed(2026, "acceptance-7-seed", index);
  config.check_invariants = true;
  return config;
}

Verdict Criterion7() {
  const Stopwatch clock;
  const int scenarios = 100;
  int clean = 0;
  uint64_t checks = 0;
  std::set<size_t> group_sizes;
  int revoked = 0;
  std::string first_problem;
  for (int s = 0; s < scenarios; ++s) {
    const ScenarioConfig config = RandomSafetyScenario(s);
    Chain chain;
    absl::StatusOr<SimReport> report = RunScenario(config, &chain);
    std::string problem;
    if (!report.ok()) {
      problem = std::string(report.status().message());
    } else {
      checks += report->invariant_checks;
      for (const VmuResult& vmu : report->vmus) {
        group_sizes.insert(vmu.group_sizes.begin(), vmu.group_sizes.end());
      }
      revoked += static_cast<int>(report->security.blacklisted);
      if (!report->invariant_violations.empty()) {
        problem = report->invariant_violations.front();
      } else if (report->security.t2t_accepted != 0) {
        problem = "revoked twin accepted";
      } else if (report->security.blacklisted != config.rogue_vts.size()) {
        problem = "misbehaving twin not blacklisted";
      } else if (VerifyChain(chain).has_value()) {
        problem = "shuffle ledger does not verify";
      } else if (report->invariant_checks != report->events_processed + 1) {
        problem = "invariants not checked after every event";
      }
    }
    if (problem.empty()) {
      ++clean;
    } else if (first_problem.empty()) {
      first_problem = absl::StrFormat("scenario %d: %s", s, problem);
    }
  }
  const bool mixed = group_sizes.size() >= 3;
  const bool ok = clean == scenarios && mixed && revoked > 0;
  return {ok,
          absl::StrFormat(
              "%d/%d randomized 60-minute scenarios clean (conservation, "
              "one-active, sync epochs, blacklist permanence) over %d "
              "invariant checks; %d distinct group sizes (max %d); %d twins "
              "revoked%s; runtime %.1fs",
              clean, scenarios, checks, group_sizes.size(),
              group_sizes.empty() ? 0 : *group_sizes.rbegin(), revoked,
              first_problem.empty() ? "" : "; first problem: " + first_problem,
              clock.Seconds())};
}

Verdict Criterion8() {
  Rng rng(DeriveSeed(2026, "acceptance-8"));
  Chain chain;
  for (int b = 0; b < 100; ++b) {
    ShuffleTransaction txn;
    txn.epoch = 10.0 * b;
    txn.rsu_id = static_cast<RsuId>(rng.UniformInt(6));
    txn.pool_kind = rng.Uniform() < 0.5 ? EntityKind::kVmu : EntityKind::kVt;
    const int count = 1 + static_cast<int>(rng.UniformInt(6));
    for (int c = 0; c < count; ++c) {
      const uint64_t word = rng.NextU64();
      const std::vector<uint8_t> bytes(reinterpret_cast<const uint8_t*>(&word),
                                       reinterpret_cast<const uint8_t*>(&word) +
                                           sizeof(word));
      txn.commitments.push_back(Sha256(bytes));
    }
    const uint64_t seed = rng.NextU64();
    txn.permutation_seed_commitment = Sha256(std::vector<uint8_t>(
        reinterpret_cast<const uint8_t*>(&seed),
        reinterpret_cast<const uint8_t*>(&seed) + sizeof(seed)));
    if (!chain.Append(txn).ok()) return {false, "could not build chain"};
  }
  const std::vector<uint8_t> clean = ExportChain(chain);
  // Locate block boundaries by exporting growing prefixes.
  std::vector<size_t> ends;
  for (size_t b = 1; b <= chain.size(); ++b) {
    const std::vector<Block> prefix(chain.blocks().begin(),
                                    chain.blocks().begin() + b);
    ends.push_back(ExportChain(Chain::FromBlocks(prefix)).size());
  }
  int detected_ok = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<uint8_t> bytes = clean;
    const size_t bit = rng.UniformInt(bytes.size() * 8);
    bytes[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
    size_t block = 0;
    while (block < ends.size() && ends[block] <= bit / 8) ++block;
    const std::optional<size_t> detected = VerifyChainBytes(bytes);
    if (detected.has_value() && *detected <= block) ++detected_ok;
  }
  return {detected_ok == trials,
          absl::StrFormat("%d/%d single-bit corruptions of a %d-block chain "
                          "detected at an index <= the corrupted block",
                          detected_ok, trials, chain.size())};
}

Verdict Criterion9() {
  int identical = 0;
  int total = 0;
  std::string differing;
  for (const std::string& name : PresetNames()) {
    absl::StatusOr<RunConfig> config = LoadPreset(name);
    if (!config.ok()) return {false, std::string(config.status().message())};
    auto render = [&]() -> std::string {
      const ExperimentSpec& spec = config->experiment;
      const std::vector<uint64_t> seeds = SeedRange(spec.first_seed, spec.seeds);
      std::string out;
      if (absl::StatusOr<SimReport> r = RunScenario(config->scenario); r.ok()) {
        out += ToJsonLines(*r);
      }
      if (spec.kind == ExperimentKind::kFig5a) {
        if (auto r = RunFig5a(config->scenario, seeds); r.ok()) {
          out += ToJsonLines(*r);
        }
      } else if (spec.kind == ExperimentKind::kFig5b) {
        if (auto r = RunFig5b(config->scenario, spec.groups, spec.betas, seeds);
            r.ok()) {
          out += ToJsonLines(*r);
        }
      }
      return out;
    };
    const std::string first = render();
    const std::string second = render();
    ++total;
    if (!first.empty() && first == second) {
      ++identical;
    } else {
      differing += " " + name;
    }
  }
  return {identical == total && total > 0,
          absl::StrFormat("%d/%d bundled presets byte-identical across two "
                          "runs with the same seed%s",
                          identical, total,
                          differing.empty() ? "" : "; differing:" + differing)};
}

}  // namespace
}  // namespace pseudosync

int main(int argc, char** argv) {
  using pseudosync::Verdict;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria =
      {{"1 scheme comparison", pseudosync::Criterion1},
       {"2 group monotonicity", pseudosync::Criterion2},
       {"3 optimizer oracle", pseudosync::Criterion3},
       {"4 concavity", pseudosync::Criterion4},
       {"5 entropy closed form", pseudosync::Criterion5},
       {"6 adversary bounds", pseudosync::Criterion6},
       {"7 protocol safety", pseudosync::Criterion7},
       {"8 ledger integrity", pseudosync::Criterion8},
       {"9 determinism", pseudosync::Criterion9}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (size_t c = 0; c < criteria.size(); ++c) {
    if (!selected.empty() && !selected.contains(static_cast<int>(c + 1))) {
      continue;
    }
    const Verdict verdict = criteria[c].second();
    std::printf("[%s] %s: %s\n", verdict.pass ? "PASS" : "FAIL",
                criteria[c].first.c_str(), verdict.detail.c_str());
    std::fflush(stdout);
    failures += verdict.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
