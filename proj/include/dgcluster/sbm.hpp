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
#include <span>
#include <vector>

#include "dgcluster/graph.hpp"

namespace dgcluster {

struct SbmGraph {
  Graph graph;
  Partition planted;
};

// Planted-partition stochastic block model. Node ids are a seeded random
// permutation; planted[i] is the block index of node i.
// Every unordered pair is an edge independently with probability p_in (same
// block) or p_out (different blocks). Pairs are visited with geometric skips,
// so the cost is proportional to the number of edges generated.
// Throws std::invalid_argument on bad parameters or when no edge is drawn.
SbmGraph generate_sbm(std::span<const std::size_t> block_sizes, double p_in, double p_out,
                      std::uint64_t seed);

// Synthetic node attributes for an SBM: the first k columns are the one-hot
// block membership, followed by `extra_dims` pure-noise columns; Gaussian
// noise N(0, noise_stddev^2) is added to every entry.
struct SbmFeatureOptions {
  std::size_t extra_dims = 12;
  double noise_stddev = 1.0;
};

Matrix generate_sbm_features(const Partition& planted, const SbmFeatureOptions& options,
                             std::uint64_t seed);

}  // namespace dgcluster
