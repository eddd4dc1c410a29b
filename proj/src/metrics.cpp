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

#include "dgcluster/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include <spdlog/spdlog.h>

#include "dgcluster/random.hpp"

namespace dgcluster {
namespace {

void check_cover(const Graph& g, const Partition& p) {
  if (p.num_nodes() != g.num_nodes()) throw std::invalid_argument("partition does not cover the graph");
}

void check_labels(const Partition& p, const NodeLabels& labels) {
  if (labels.size() != p.num_nodes()) throw std::invalid_argument("labels and partition sizes differ");
}

// Internal edge counts and degree sums per cluster.
struct ClusterVolumes {
  std::vector<double> internal_edges;
  std::vector<double> degree_sum;
};

ClusterVolumes cluster_volumes(const Graph& g, const Partition& p) {
  ClusterVolumes v{std::vector<double>(p.num_clusters(), 0.0), std::vector<double>(p.num_clusters(), 0.0)};
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    const auto c = static_cast<std::size_t>(p[u]);
    v.degree_sum[c] += static_cast<double>(g.degrees()[u]);
    for (NodeId w : g.neighbors(static_cast<NodeId>(u))) {
      if (static_cast<std::size_t>(u) < static_cast<std::size_t>(w) && p[static_cast<std::size_t>(w)] == p[u]) {
        v.internal_edges[c] += 1.0;
      }
    }
  }
  return v;
}

double pairs_of(double count) { return count * (count - 1.0) / 2.0; }

}  // namespace

double modularity(const Graph& g, const Partition& p) {
  check_cover(g, p);
  if (g.num_edges() == 0) throw std::invalid_argument("modularity: graph has no edges");
  const double m = static_cast<double>(g.num_edges());
  const auto v = cluster_volumes(g, p);
  double q = 0.0;
  for (std::size_t c = 0; c < p.num_clusters(); ++c) {
    const double share = v.degree_sum[c] / (2.0 * m);
    q += v.internal_edges[c] / m - share * share;
  }
  return q;
}

double conductance(const Graph& g, const Partition& p) {
  check_cover(g, p);
  if (p.num_clusters() == 0) return 0.0;
  const auto v = cluster_volumes(g, p);
  double total = 0.0;
  std::size_t empty_volume = 0;
  for (std::size_t c = 0; c < p.num_clusters(); ++c) {
    // Volume = 2 * internal + cut = degree sum.
    const double volume = v.degree_sum[c];
    if (volume == 0.0) {
      ++empty_volume;
      continue;
    }
    const double cut = volume - 2.0 * v.internal_edges[c];
    total += cut / volume;
  }
  if (empty_volume > 0) spdlog::warn("conductance: {} cluster(s) with zero volume count as 0", empty_volume);
  return total / static_cast<double>(p.num_clusters());
}

double nmi(const Partition& p, const NodeLabels& labels) {
  check_labels(p, labels);
  std::map<std::pair<ClusterId, std::int32_t>, double> joint;
  std::map<ClusterId, double> cluster_counts;
  std::map<std::int32_t, double> label_counts;
  double total = 0.0;
  for (std::size_t i = 0; i < p.num_nodes(); ++i) {
    if (!labels[i]) continue;
    joint[{p[i], *labels[i]}] += 1.0;
    cluster_counts[p[i]] += 1.0;
    label_counts[*labels[i]] += 1.0;
    total += 1.0;
  }
  if (total == 0.0) throw std::invalid_argument("nmi: no labeled nodes");

  auto entropy = [total](const auto& counts) {
    double h = 0.0;
    for (const auto& [key, c] : counts) h -= (c / total) * std::log(c / total);
    return h;
  };
  const double h_p = entropy(cluster_counts);
  const double h_y = entropy(label_counts);
  if (h_p == 0.0 && h_y == 0.0) return 1.0;
  if (h_p == 0.0 || h_y == 0.0) return 0.0;

  double mutual = 0.0;
  for (const auto& [key, c] : joint) {
    const double pc = cluster_counts.at(key.first) / total;
    const double py = label_counts.at(key.second) / total;
    mutual += (c / total) * std::log((c / total) / (pc * py));
  }
  return std::clamp(2.0 * mutual / (h_p + h_y), 0.0, 1.0);
}

double pairwise_f1(const Partition& p, const NodeLabels& labels, std::size_t sample_size, std::uint64_t seed) {
  check_labels(p, labels);
  std::vector<NodeId> nodes = labels.labeled_nodes();
  if (nodes.size() < 2) throw std::invalid_argument("pairwise_f1: need at least two labeled nodes");
  if (sample_size < nodes.size()) {
    Rng rng(seed);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    nodes.resize(std::max<std::size_t>(sample_size, 2));
  }

  std::map<ClusterId, double> cluster_counts;
  std::map<std::int32_t, double> label_counts;
  std::map<std::pair<ClusterId, std::int32_t>, double> joint;
  for (NodeId u : nodes) {
    const auto i = static_cast<std::size_t>(u);
    cluster_counts[p[i]] += 1.0;
    label_counts[*labels[i]] += 1.0;
    joint[{p[i], *labels[i]}] += 1.0;
  }
  double predicted = 0.0;
  double actual = 0.0;
  double true_positive = 0.0;
  for (const auto& [c, n] : cluster_counts) predicted += pairs_of(n);
  for (const auto& [l, n] : label_counts) actual += pairs_of(n);
  for (const auto& [key, n] : joint) true_positive += pairs_of(n);
  if (predicted == 0.0 || actual == 0.0 || true_positive == 0.0) return 0.0;
  const double precision = true_positive / predicted;
  const double recall = true_positive / actual;
  return 2.0 * precision * recall / (precision + recall);
}

MetricsReport evaluate_partition(const Graph& g, const Partition& p, const NodeLabels* labels,
                                 std::uint64_t f1_seed, std::size_t f1_sample_size) {
  MetricsReport report;
  report.q = modularity(g, p);
  report.conductance = conductance(g, p);
  report.k_found = p.num_clusters();
  if (labels) {
    const std::size_t labeled = labels->num_labeled();
    if (labeled >= 1) report.nmi = nmi(p, *labels);
    if (labeled >= 2) report.f1 = pairwise_f1(p, *labels, f1_sample_size, f1_seed);
  }
  return report;
}

}  // namespace dgcluster
