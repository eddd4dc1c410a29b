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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace dgcluster {

using NodeId = std::int32_t;
using ClusterId = std::int32_t;

// Dense node-by-dimension matrices (features, embeddings, gradients).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Undirected simple graph in compressed sparse row form. Every undirected edge
// is stored in both directions; rows are sorted and free of self-loops and
// duplicates. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  // Builds a graph on `num_nodes` nodes from an arbitrary edge list.
  // Directions are symmetrized, duplicates and self-loops dropped.
  // Throws std::out_of_range if an endpoint is outside [0, num_nodes).
  static Graph from_edges(std::size_t num_nodes,
                          std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t num_nodes() const noexcept { return degrees_.size(); }
  std::size_t num_edges() const noexcept { return col_indices_.size() / 2; }

  std::span<const std::int64_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const NodeId> col_indices() const noexcept { return col_indices_; }
  std::span<const std::int64_t> degrees() const noexcept { return degrees_; }

  std::int64_t degree(NodeId u) const { return degrees_[static_cast<std::size_t>(u)]; }
  std::span<const NodeId> neighbors(NodeId u) const;
  bool has_edge(NodeId u, NodeId v) const;

  // Canonical (u < v) edge list.
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  // Returns false if any CSR invariant (symmetry, sortedness, no self-loops,
  // degree consistency) is violated.
  bool check_invariants() const;

 private:
  std::vector<std::int64_t> row_offsets_{0};
  std::vector<NodeId> col_indices_;
  std::vector<std::int64_t> degrees_;
};

// Hard clustering: a contiguous, nonempty cluster id for every node.
class Partition {
 public:
  Partition() = default;

  // Takes ids that already satisfy the invariants (every id in [0, k), every
  // cluster nonempty). Throws std::invalid_argument otherwise.
  explicit Partition(std::vector<ClusterId> assignment);

  // Relabels arbitrary non-negative ids to 0..k-1, preserving their order.
  static Partition compact(std::span<const std::int64_t> raw_ids);

  std::size_t num_nodes() const noexcept { return assignment_.size(); }
  std::size_t num_clusters() const noexcept { return num_clusters_; }
  ClusterId operator[](std::size_t node) const { return assignment_[node]; }
  std::span<const ClusterId> assignment() const noexcept { return assignment_; }
  std::vector<std::size_t> cluster_sizes() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<ClusterId> assignment_;
  std::size_t num_clusters_ = 0;
};

// Per-node class labels; nodes without a label hold std::nullopt.
class NodeLabels {
 public:
  NodeLabels() = default;
  explicit NodeLabels(std::vector<std::optional<std::int32_t>> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::optional<std::int32_t>& operator[](std::size_t node) const { return labels_[node]; }
  std::span<const std::optional<std::int32_t>> values() const noexcept { return labels_; }

  // Nodes that carry a label, ascending.
  std::vector<NodeId> labeled_nodes() const;
  std::size_t num_labeled() const;
  std::size_t num_distinct() const;

  static NodeLabels from_partition(const Partition& p);

 private:
  std::vector<std::optional<std::int32_t>> labels_;
};

// D^-1/2 A D^-1/2 without self-loops. Rows of isolated nodes are empty (their
// inverse square-root degree is taken as 0) and a warning is logged.
SparseMatrix normalized_adjacency(const Graph& g);

}  // namespace dgcluster
