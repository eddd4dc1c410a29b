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

#include "dgcluster/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dgcluster/random.hpp"

namespace dgcluster {
namespace {

// Number of Bernoulli(p) failures before the next success, or a huge value
// when p == 0.
std::uint64_t geometric_skip(Rng& rng, double p) {
  if (p >= 1.0) return 0;
  if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  const double skip = std::floor(std::log1p(-u) / std::log1p(-p));
  if (skip >= 1e18) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(skip);
}

// Calls emit(t) for each selected index t in [0, count).
template <typename Emit>
void sample_indices(Rng& rng, std::uint64_t count, double p, Emit&& emit) {
  std::uint64_t t = 0;
  while (true) {
    const std::uint64_t skip = geometric_skip(rng, p);
    if (skip >= count - t) return;
    t += skip;
    emit(t);
    if (++t >= count) return;
  }
}

}  // namespace

SbmGraph generate_sbm(std::span<const std::size_t> block_sizes, double p_in, double p_out,
                      std::uint64_t seed) {
  if (block_sizes.empty()) throw std::invalid_argument("generate_sbm: no blocks");
  if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0)) {
    throw std::invalid_argument("generate_sbm: require 0 <= p_out <= p_in <= 1");
  }
  for (std::size_t s : block_sizes) {
    if (s == 0) throw std::invalid_argument("generate_sbm: empty block");
  }

  std::vector<std::size_t> offsets(block_sizes.size() + 1, 0);
  std::partial_sum(block_sizes.begin(), block_sizes.end(), offsets.begin() + 1);
  const std::size_t n = offsets.back();

  std::vector<ClusterId> planted(n);
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    for (std::size_t i = offsets[b]; i < offsets[b + 1]; ++i) planted[i] = static_cast<ClusterId>(b);
  }

  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t a = 0; a < block_sizes.size(); ++a) {
    const std::uint64_t sa = block_sizes[a];
    // Within block: pair index t enumerates (i, j), j < i, row by row.
    {
      std::uint64_t row = 1;
      std::uint64_t row_start = 0;
      sample_indices(rng, sa * (sa - 1) / 2, p_in, [&](std::uint64_t t) {
        while (t >= row_start + row) {
          row_start += row;
          ++row;
        }
        edges.emplace_back(static_cast<NodeId>(offsets[a] + row),
                           static_cast<NodeId>(offsets[a] + (t - row_start)));
      });
    }
    for (std::size_t b = a + 1; b < block_sizes.size(); ++b) {
      const std::uint64_t sb = block_sizes[b];
      sample_indices(rng, sa * sb, p_out, [&](std::uint64_t t) {
        edges.emplace_back(static_cast<NodeId>(offsets[a] + t / sb),
                           static_cast<NodeId>(offsets[b] + t % sb));
      });
    }
  }
  if (edges.empty()) throw std::invalid_argument("generate_sbm: sampled graph has no edges");

  // Random node ids, so block membership is not encoded in id order.
  std::vector<NodeId> relabel(n);
  std::iota(relabel.begin(), relabel.end(), NodeId{0});
  std::shuffle(relabel.begin(), relabel.end(), rng);
  for (auto& [u, v] : edges) {
    u = relabel[static_cast<std::size_t>(u)];
    v = relabel[static_cast<std::size_t>(v)];
  }
  std::vector<ClusterId> shuffled(n);
  for (std::size_t i = 0; i < n; ++i) shuffled[static_cast<std::size_t>(relabel[i])] = planted[i];

  return SbmGraph{Graph::from_edges(n, edges), Partition(std::move(shuffled))};
}

Matrix generate_sbm_features(const Partition& planted, const SbmFeatureOptions& options,
                             std::uint64_t seed) {
  if (!(options.noise_stddev >= 0.0)) throw std::invalid_argument("noise_stddev must be >= 0");
  const auto n = static_cast<Eigen::Index>(planted.num_nodes());
  const auto k = static_cast<Eigen::Index>(planted.num_clusters());
  const auto r = k + static_cast<Eigen::Index>(options.extra_dims);
  Matrix features = Matrix::Zero(n, r);
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    features(i, planted[static_cast<std::size_t>(i)]) = 1.0;
    for (Eigen::Index j = 0; j < r; ++j) features(i, j) += options.noise_stddev * noise(rng);
  }
  return features;
}

}  // namespace dgcluster
