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

// Seeded random streams. Every consumer derives its own stream from the master
// seed plus a stream name, so adding draws to one subsystem never shifts the
// draws seen by another. All conversions from raw bits to numbers are done
// here rather than through <random> distributions, whose output is not
// specified bit-for-bit across standard libraries.

#ifndef PSEUDOSYNC_RNG_H_
#define PSEUDOSYNC_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace pseudosync {

// Recorded in every report header.
inline constexpr char kRngAlgorithm[] =
    "mt19937_64; streams=splitmix64(master^fnv1a64(name))+index; "
    "uniform=53-bit; poisson=sequential-inversion(chunk<=500)";

uint64_t SplitMix64(uint64_t x);

// Seed for the named sub-stream `index` of `master`.
uint64_t DeriveSeed(uint64_t master, std::string_view stream,
                    uint64_t index = 0);

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform();
  // Uniform on (0, 1].
  double UniformOpenLow() { return 1.0 - Uniform(); }
  // Uniform integer on [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);
  double Exponential(double rate);
  int64_t Poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace pseudosync

#endif  // PSEUDOSYNC_RNG_H_
