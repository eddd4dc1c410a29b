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
#include <optional>

#include "dgcluster/graph.hpp"

namespace dgcluster {

// Newman modularity, sum over clusters of (m_c / m - (D_c / 2m)^2) where m_c
// counts internal edges and D_c is the cluster's degree sum.
double modularity(const Graph& g, const Partition& p);

// Mean over clusters of cut / (2 * internal + cut). A cluster with zero volume
// contributes 0 and logs a warning.
double conductance(const Graph& g, const Partition& p);

// 2 I(P; Y) / (H(P) + H(Y)) over labeled nodes, natural log. Both entropies
// zero gives 1; exactly one zero gives 0.
double nmi(const Partition& p, const NodeLabels& labels);

// Pair-counting F1 over a seeded sample (without replacement) of at most
// `sample_size` labeled nodes. Positive pairs share a cluster; true pairs
// share a label.
double pairwise_f1(const Partition& p, const NodeLabels& labels, std::size_t sample_size,
                   std::uint64_t seed);

inline constexpr std::size_t kDefaultF1SampleSize = 1000;

struct MetricsReport {
  double q = 0.0;
  double conductance = 0.0;
  std::optional<double> nmi;
  std::optional<double> f1;
  std::size_t k_found = 0;
};

MetricsReport evaluate_partition(const Graph& g, const Partition& p, const NodeLabels* labels,
                                 std::uint64_t f1_seed, std::size_t f1_sample_size = kDefaultF1SampleSize);

}  // namespace dgcluster
