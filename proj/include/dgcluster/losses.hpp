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

// Training objective over node embeddings X (n x k, rows expected to be
// nonnegative unit vectors):
//
//   total = l1 + lambda * l2 + alpha * |mean(X)|^4
//
// l1 is negative soft modularity, -Tr(X^T B X) / 2m with B = A - d d^T / 2m,
// evaluated as -(Tr(X^T A X) - |X^T d|^2 / 2m) / 2m so B and X X^T are never
// formed. l2 matches embedding similarities to auxiliary co-membership:
//
//   label form  |H - X_S X_S^T|_F^2 / |S|^2 with H = C C^T, via
//               Tr((C^T C)^2) + Tr((X_S^T X_S)^2) - 2 Tr(X_S^T C C^T X_S)
//   pair form   mean over same-cluster pairs of (1 - X_i . X_j)^2
//
// Every term returns its value and the gradient with respect to X.

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dgcluster/graph.hpp"

namespace dgcluster {

struct LossTerm {
  double value = 0.0;
  Matrix gradient;
};

// Known cluster labels for a subset S of the nodes; the one-hot matrix C is
// implied by `labels` (values in [0, num_classes)).
struct LabelSupervision {
  std::vector<NodeId> nodes;
  std::vector<std::int32_t> labels;
  std::size_t num_classes = 0;

  // Compacts arbitrary label ids to [0, p). Throws on size mismatch,
  // duplicate nodes or negative labels.
  static LabelSupervision from_labels(std::vector<NodeId> nodes, std::span<const std::int32_t> raw_labels);
  void validate(std::size_t num_nodes) const;
};

// Node pairs known to share a cluster.
struct PairSupervision {
  std::vector<std::pair<NodeId, NodeId>> pairs;

  void validate(std::size_t num_nodes) const;
};

using Supervision = std::variant<std::monostate, LabelSupervision, PairSupervision>;

struct LossWeights {
  double lambda = 0.0;  // auxiliary term
  double alpha = 0.0;   // collapse regularizer
};

struct LossReport {
  double l1 = 0.0;
  double l2 = 0.0;
  double reg = 0.0;
  double total = 0.0;
  double soft_modularity = 0.0;  // -l1

  static std::string csv_header();  // "epoch,l1,l2,reg,total,soft_modularity"
  std::string csv_row(std::size_t epoch) const;
};

// Throws std::invalid_argument if the graph has no edges or shapes differ.
LossTerm modularity_loss(const Matrix& x, const Graph& g);

// Throws std::invalid_argument if S is empty.
LossTerm aux_loss_labels(const Matrix& x, const LabelSupervision& aux);

// Throws std::invalid_argument if there are no pairs.
LossTerm aux_loss_pairs(const Matrix& x, const PairSupervision& aux);

// alpha * |mean row|^4.
LossTerm collapse_regularizer(const Matrix& x, double alpha);

// Sum of the terms above; l2 is 0 when `aux` holds no supervision.
std::pair<LossReport, Matrix> total_loss(const Matrix& x, const Graph& g, const Supervision& aux,
                                         const LossWeights& weights);

}  // namespace dgcluster
