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

#include "pseudosync/rng.h"

#include <cmath>
#include <limits>

namespace pseudosync {
namespace {

uint64_t Fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Largest mean drawn in a single inversion pass; exp(-500) is still a normal
// double, so the sequential search never starts from an underflowed mass.
constexpr double kPoissonChunk = 500.0;

int64_t PoissonInversion(Rng& rng, double mean) {
  const double u = rng.Uniform();
  double mass = std::exp(-mean);
  double cdf = mass;
  int64_t k = 0;
  while (u >= cdf) {
    ++k;
    mass *= mean / static_cast<double>(k);
    cdf += mass;
    // Rounding can leave cdf a hair below 1 forever.
    if (mass == 0.0 && static_cast<double>(k) > mean) break;
  }
  return k;
}

}  // namespace

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t master, std::string_view stream, uint64_t index) {
  return SplitMix64(SplitMix64(master ^ Fnv1a64(stream)) + index);
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

uint64_t Rng::UniformInt(uint64_t n) {
  // Rejection sampling keeps the draw unbiased for any n.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::Exponential(double rate) {
  return -std::log(UniformOpenLow()) / rate;
}

int64_t Rng::Poisson(double mean) {
  if (mean <= 0.0) return 0;
  int64_t total = 0;
  while (mean > kPoissonChunk) {
    total += PoissonInversion(*this, kPoissonChunk);
    mean -= kPoissonChunk;
  }
  return total + PoissonInversion(*this, mean);
}

}  // namespace pseudosync
