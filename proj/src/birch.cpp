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

#include "dgcluster/birch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "dgcluster/errors.hpp"

namespace dgcluster {

void BirchParams::validate() const {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) throw std::invalid_argument("birch: threshold must be > 0");
  if (branching_factor < 2) throw std::invalid_argument("birch: branching_factor must be >= 2");
}

ClusteringFeature::ClusteringFeature(const Eigen::Ref<const Eigen::RowVectorXd>& point)
    : count_(1), linear_sum_(point), squared_sum_(point.squaredNorm()) {}

void ClusteringFeature::merge(const ClusteringFeature& other) {
  if (count_ == 0) {
    *this = other;
    return;
  }
  count_ += other.count_;
  linear_sum_ += other.linear_sum_;
  squared_sum_ += other.squared_sum_;
}

Eigen::RowVectorXd ClusteringFeature::centroid() const {
  return linear_sum_ / static_cast<double>(count_);
}

double ClusteringFeature::radius() const {
  const double n = static_cast<double>(count_);
  const double r2 = squared_sum_ / n - (linear_sum_ / n).squaredNorm();
  return std::sqrt(std::max(r2, 0.0));
}

double ClusteringFeature::merged_radius(const ClusteringFeature& other) const {
  ClusteringFeature merged = *this;
  merged.merge(other);
  return merged.radius();
}

struct CfTree::Node {
  struct Entry {
    ClusteringFeature cf;
    std::unique_ptr<Node> child;     // internal entries
    std::vector<std::size_t> points;  // leaf entries
  };

  bool is_leaf = true;
  std::vector<Entry> entries;
};

namespace {

using Node = CfTree::Node;
using Entry = CfTree::Node::Entry;

std::size_t closest_entry(const std::vector<Entry>& entries, const Eigen::RowVectorXd& centroid) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double dist = (entries[i].cf.centroid() - centroid).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

// Splits an overfull node in two around its farthest pair of entries.
std::pair<Entry, Entry> split_node(Node& node) {
  const std::size_t count = node.entries.size();
  std::vector<Eigen::RowVectorXd> centroids;
  centroids.reserve(count);
  for (const Entry& e : node.entries) centroids.push_back(e.cf.centroid());

  std::size_t seed_a = 0;
  std::size_t seed_b = 1;
  double farthest = -1.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double dist = (centroids[i] - centroids[j]).squaredNorm();
      if (dist > farthest) {
        farthest = dist;
        seed_a = i;
        seed_b = j;
      }
    }
  }

  auto left = std::make_unique<Node>();
  auto right = std::make_unique<Node>();
  left->is_leaf = right->is_leaf = node.is_leaf;
  Entry left_entry;
  Entry right_entry;
  for (std::size_t i = 0; i < count; ++i) {
    bool to_left;
    if (i == seed_a) {
      to_left = true;
    } else if (i == seed_b) {
      to_left = false;
    } else {
      to_left = (centroids[i] - centroids[seed_a]).squaredNorm() <=
                (centroids[i] - centroids[seed_b]).squaredNorm();
    }
    Entry& summary = to_left ? left_entry : right_entry;
    summary.cf.merge(node.entries[i].cf);
    (to_left ? left : right)->entries.push_back(std::move(node.entries[i]));
  }
  left_entry.child = std::move(left);
  right_entry.child = std::move(right);
  return {std::move(left_entry), std::move(right_entry)};
}

// Returns true if `node` now holds more than `branching_factor` entries.
bool insert_entry(Node& node, Entry incoming, const BirchParams& params) {
  if (node.entries.empty()) {
    node.entries.push_back(std::move(incoming));
    return false;
  }
  const std::size_t best = closest_entry(node.entries, incoming.cf.centroid());
  Entry& target = node.entries[best];

  if (target.child) {
    const ClusteringFeature added = incoming.cf;
    if (!insert_entry(*target.child, std::move(incoming), params)) {
      target.cf.merge(added);
      return false;
    }
    auto [first, second] = split_node(*target.child);
    node.entries[best] = std::move(first);
    node.entries.push_back(std::move(second));
    return node.entries.size() > params.branching_factor;
  }

  if (target.cf.merged_radius(incoming.cf) <= params.threshold) {
    target.cf.merge(incoming.cf);
    target.points.insert(target.points.end(), incoming.points.begin(), incoming.points.end());
    return false;
  }
  node.entries.push_back(std::move(incoming));
  return node.entries.size() > params.branching_factor;
}

void collect_leaves(const Node& node, std::vector<std::vector<std::size_t>>& out) {
  for (const Entry& e : node.entries) {
    if (e.child) {
      collect_leaves(*e.child, out);
    } else {
      out.push_back(e.points);
    }
  }
}

bool check_node(const Node& node, const BirchParams& params, double tol) {
  if (node.entries.size() > params.branching_factor) return false;
  for (const Entry& e : node.entries) {
    if (node.is_leaf) {
      if (e.child || e.points.size() != e.cf.count()) return false;
      continue;
    }
    if (!e.child || e.child->entries.empty()) return false;
    ClusteringFeature sum;
    for (const Entry& c : e.child->entries) sum.merge(c.cf);
    if (sum.count() != e.cf.count()) return false;
    if ((sum.linear_sum() - e.cf.linear_sum()).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(sum.squared_sum() - e.cf.squared_sum()) > tol) return false;
    if (!check_node(*e.child, params, tol)) return false;
  }
  return true;
}

std::size_t node_height(const Node& node) {
  std::size_t h = 0;
  for (const Entry& e : node.entries) {
    if (e.child) h = std::max(h, node_height(*e.child));
  }
  return h + 1;
}

}  // namespace

CfTree::CfTree(std::size_t dim, BirchParams params)
    : dim_(dim), params_(params), root_(std::make_unique<Node>()) {
  params_.validate();
}

CfTree::~CfTree() = default;
CfTree::CfTree(CfTree&&) noexcept = default;
CfTree& CfTree::operator=(CfTree&&) noexcept = default;

void CfTree::insert(std::size_t point_id, const Eigen::Ref<const Eigen::RowVectorXd>& point) {
  if (static_cast<std::size_t>(point.size()) != dim_) throw ShapeError("birch: point dimension mismatch");
  if (!point.allFinite()) throw NumericError("birch: point " + std::to_string(point_id) + " is not finite");
  Entry entry;
  entry.cf = ClusteringFeature(point);
  entry.points.push_back(point_id);
  if (insert_entry(*root_, std::move(entry), params_)) {
    auto [first, second] = split_node(*root_);
    auto root = std::make_unique<Node>();
    root->is_leaf = false;
    root->entries.push_back(std::move(first));
    root->entries.push_back(std::move(second));
    root_ = std::move(root);
  }
}

std::vector<std::vector<std::size_t>> CfTree::leaf_subclusters() const {
  std::vector<std::vector<std::size_t>> out;
  collect_leaves(*root_, out);
  return out;
}

std::size_t CfTree::num_leaf_subclusters() const { return leaf_subclusters().size(); }

std::size_t CfTree::height() const { return node_height(*root_); }

bool CfTree::check_invariants(double tolerance) const { return check_node(*root_, params_, tolerance); }

Partition birch_fit(const Matrix& x, const BirchParams& params, std::span<const std::size_t> insertion_order) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0) throw std::invalid_argument("birch_fit: no points");
  if (insertion_order.size() != n) throw std::invalid_argument("birch_fit: insertion order has wrong length");
  std::vector<bool> seen(n, false);
  for (std::size_t i : insertion_order) {
    if (i >= n || seen[i]) throw std::invalid_argument("birch_fit: insertion order is not a permutation");
    seen[i] = true;
  }

  CfTree tree(static_cast<std::size_t>(x.cols()), params);
  for (std::size_t i : insertion_order) tree.insert(i, x.row(static_cast<Eigen::Index>(i)));

  // Subclusters are numbered by their smallest member.
  std::vector<std::int64_t> ids(n, -1);
  for (const auto& members : tree.leaf_subclusters()) {
    const auto label = static_cast<std::int64_t>(*std::min_element(members.begin(), members.end()));
    for (std::size_t p : members) ids[p] = label;
  }
  return Partition::compact(ids);
}

Partition birch_fit(const Matrix& x, const BirchParams& params) {
  std::vector<std::size_t> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  return birch_fit(x, params, order);
}

Partition assign_singletons(std::span<const std::int64_t> cluster_ids, const Graph& g) {
  if (cluster_ids.size() != g.num_nodes()) {
    throw std::invalid_argument("assign_singletons: cluster ids do not cover the graph");
  }
  return Partition::compact(cluster_ids);
}

}  // namespace dgcluster
