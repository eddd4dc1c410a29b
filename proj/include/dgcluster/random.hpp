// Copyright 2026 The DGCluster Authors.
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

#pragma once

#include <cstdint>
#include <random>

namespace dgcluster {

using Rng = std::mt19937_64;

// Independent random streams derived from one run seed.
enum class SeedStream : std::uint64_t {
  kInit = 1,
  kGraph = 2,
  kFeatures = 3,
  kLabelSubset = 4,
  kF1Sample = 5,
  kPairs = 6,
};

// splitmix64 finalizer.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t run_seed, SeedStream stream) {
  return mix_seed(mix_seed(run_seed) ^ static_cast<std::uint64_t>(stream));
}

}  // namespace dgcluster
