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

// BIRCH clustering over embedding rows. A CF-tree is grown by inserting
// points one at a time; each leaf entry (subcluster) becomes one output
// cluster, so the number of clusters is an outcome of the threshold rather
// than an input. There is no global merge phase.
//
// On unit vectors |x - y|^2 = 2 (1 - cos(x, y)), so Euclidean CF geometry
// orders pairs exactly as cosine similarity does.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dgcluster/graph.hpp"

namespace dgcluster {

struct BirchParams {
  double threshold = 0.5;             // max subcluster radius
  std::size_t branching_factor = 50;  // max entries per node

  void validate() const;
};

// (count, linear sum, squared sum) summary of a point set.
class ClusteringFeature {
 public:
  ClusteringFeature() = default;
  explicit ClusteringFeature(const Eigen::Ref<const Eigen::RowVectorXd>& point);

  void merge(const ClusteringFeature& other);

  std::size_t count() const noexcept { return count_; }
  const Eigen::RowVectorXd& linear_sum() const noexcept { return linear_sum_; }
  double squared_sum() const noexcept { return squared_sum_; }

  Eigen::RowVectorXd centroid() const;
  // sqrt(ss/n - |ls/n|^2), negative round-off clamped to 0.
  double radius() const;
  // Radius the union with `other` would have.
  double merged_radius(const ClusteringFeature& other) const;

 private:
  std::size_t count_ = 0;
  Eigen::RowVectorXd linear_sum_;
  double squared_sum_ = 0.0;
};

class CfTree {
 public:
  CfTree(std::size_t dim, BirchParams params);
  ~CfTree();
  CfTree(CfTree&&) noexcept;
  CfTree& operator=(CfTree&&) noexcept;

  void insert(std::size_t point_id, const Eigen::Ref<const Eigen::RowVectorXd>& point);

  // Point ids per leaf subcluster, leaves visited left to right.
  std::vector<std::vector<std::size_t>> leaf_subclusters() const;
  std::size_t num_leaf_subclusters() const;
  std::size_t height() const;

  // Checks every internal entry's CF against the sum of its child's CFs and
  // the branching-factor bound.
  bool check_invariants(double tolerance = 1e-9) const;

  struct Node;

 private:
  std::size_t dim_;
  BirchParams params_;
  std::unique_ptr<Node> root_;
};

// Inserts rows in index order. Throws NumericError on non-finite input.
Partition birch_fit(const Matrix& x, const BirchParams& params = {});

// Inserts rows in the given order (a permutation of 0..n-1).
Partition birch_fit(const Matrix& x, const BirchParams& params, std::span<const std::size_t> insertion_order);

// Relabels arbitrary cluster ids of the graph's nodes to contiguous 0..k-1
// (order-preserving). Isolated nodes keep whichever cluster they were given.
Partition assign_singletons(std::span<const std::int64_t> cluster_ids, const Graph& g);

}  // namespace dgcluster
