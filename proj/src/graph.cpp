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

#include "dgcluster/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

namespace dgcluster {

Graph Graph::from_edges(std::size_t num_nodes,
                        std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<std::vector<NodeId>> adjacency(num_nodes);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= num_nodes ||
        static_cast<std::size_t>(v) >= num_nodes) {
      throw std::out_of_range("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") outside node range [0, " + std::to_string(num_nodes) + ")");
    }
    if (u == v) continue;
    adjacency[static_cast<std::size_t>(u)].push_back(v);
    adjacency[static_cast<std::size_t>(v)].push_back(u);
  }

  Graph g;
  g.row_offsets_.assign(num_nodes + 1, 0);
  g.degrees_.assign(num_nodes, 0);
  for (std::size_t u = 0; u < num_nodes; ++u) {
    auto& row = adjacency[u];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    g.degrees_[u] = static_cast<std::int64_t>(row.size());
    g.row_offsets_[u + 1] = g.row_offsets_[u] + g.degrees_[u];
  }
  g.col_indices_.reserve(static_cast<std::size_t>(g.row_offsets_.back()));
  for (const auto& row : adjacency) {
    g.col_indices_.insert(g.col_indices_.end(), row.begin(), row.end());
  }
  return g;
}

std::span<const NodeId> Graph::neighbors(NodeId u) const {
  const auto begin = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(u)]);
  const auto end = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(u) + 1]);
  return std::span<const NodeId>(col_indices_).subspan(begin, end - begin);
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(num_edges());
  for (std::size_t u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(static_cast<NodeId>(u))) {
      if (static_cast<NodeId>(u) < v) edges.emplace_back(static_cast<NodeId>(u), v);
    }
  }
  return edges;
}

bool Graph::check_invariants() const {
  const std::size_t n = num_nodes();
  if (row_offsets_.size() != n + 1 || row_offsets_.front() != 0) return false;
  if (static_cast<std::size_t>(row_offsets_.back()) != col_indices_.size()) return false;
  std::int64_t degree_sum = 0;
  for (std::size_t u = 0; u < n; ++u) {
    if (degrees_[u] != row_offsets_[u + 1] - row_offsets_[u]) return false;
    degree_sum += degrees_[u];
    const auto row = neighbors(static_cast<NodeId>(u));
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] < 0 || static_cast<std::size_t>(row[i]) >= n) return false;
      if (row[i] == static_cast<NodeId>(u)) return false;
      if (i > 0 && row[i - 1] >= row[i]) return false;
      if (!has_edge(row[i], static_cast<NodeId>(u))) return false;
    }
  }
  return degree_sum == 2 * static_cast<std::int64_t>(num_edges());
}

Partition::Partition(std::vector<ClusterId> assignment) : assignment_(std::move(assignment)) {
  ClusterId max_id = -1;
  for (ClusterId c : assignment_) {
    if (c < 0) throw std::invalid_argument("partition: negative cluster id");
    max_id = std::max(max_id, c);
  }
  num_clusters_ = static_cast<std::size_t>(max_id + 1);
  std::vector<bool> seen(num_clusters_, false);
  for (ClusterId c : assignment_) seen[static_cast<std::size_t>(c)] = true;
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("partition: cluster ids are not contiguous (empty cluster)");
  }
}

Partition Partition::compact(std::span<const std::int64_t> raw_ids) {
  std::map<std::int64_t, ClusterId> rank;
  for (std::int64_t id : raw_ids) {
    if (id < 0) throw std::invalid_argument("partition: negative cluster id");
    rank.emplace(id, 0);
  }
  ClusterId next = 0;
  for (auto& [id, r] : rank) r = next++;
  std::vector<ClusterId> assignment;
  assignment.reserve(raw_ids.size());
  for (std::int64_t id : raw_ids) assignment.push_back(rank.at(id));
  return Partition(std::move(assignment));
}

std::vector<std::size_t> Partition::cluster_sizes() const {
  std::vector<std::size_t> sizes(num_clusters_, 0);
  for (ClusterId c : assignment_) ++sizes[static_cast<std::size_t>(c)];
  return sizes;
}

NodeLabels::NodeLabels(std::vector<std::optional<std::int32_t>> labels)
    : labels_(std::move(labels)) {
  for (const auto& l : labels_) {
    if (l && *l < 0) throw std::invalid_argument("labels: negative label id");
  }
}

std::vector<NodeId> NodeLabels::labeled_nodes() const {
  std::vector<NodeId> nodes;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i]) nodes.push_back(static_cast<NodeId>(i));
  }
  return nodes;
}

std::size_t NodeLabels::num_labeled() const {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(), [](const auto& l) { return l.has_value(); }));
}

std::size_t NodeLabels::num_distinct() const {
  std::set<std::int32_t> distinct;
  for (const auto& l : labels_) {
    if (l) distinct.insert(*l);
  }
  return distinct.size();
}

NodeLabels NodeLabels::from_partition(const Partition& p) {
  std::vector<std::optional<std::int32_t>> labels(p.assignment().begin(), p.assignment().end());
  return NodeLabels(std::move(labels));
}

SparseMatrix normalized_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  const auto isolated = static_cast<std::size_t>(
      std::count(g.degrees().begin(), g.degrees().end(), std::int64_t{0}));
  if (isolated > 0) {
    spdlog::warn("normalized_adjacency: {} isolated node(s) get all-zero rows", isolated);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.col_indices().size());
  for (std::size_t u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(static_cast<NodeId>(u))) {
      // 1/sqrt(d_u d_v) evaluated as a single rounding so symmetric entries agree.
      const double w = 1.0 / std::sqrt(static_cast<double>(g.degrees()[u]) *
                                       static_cast<double>(g.degrees()[static_cast<std::size_t>(v)]));
      triplets.emplace_back(static_cast<int>(u), v, w);
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

}  // namespace dgcluster
