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

// Brute-force reference implementations used to check the library. They work
// on dense matrices and share no code with the library's fast paths.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dgcluster/graph.hpp"
#include "dgcluster/losses.hpp"
#include "dgcluster/nn.hpp"

namespace dgcluster::oracle {

inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(p);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (edge(rng)) edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  }
  return Graph::from_edges(n, edges);
}

// Random graph with at least one edge; n must be at least 2.
inline Graph random_nonempty_graph(std::size_t n, double p, std::mt19937_64& rng) {
  if (n < 2 || p <= 0.0) throw std::invalid_argument("random_nonempty_graph: needs n >= 2 and p > 0");
  for (;;) {
    Graph g = random_graph(n, p, rng);
    if (g.num_edges() > 0) return g;
  }
}

inline Partition random_partition(std::size_t n, std::size_t max_k, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> pick(0, static_cast<std::int64_t>(max_k) - 1);
  std::vector<std::int64_t> ids(n);
  for (auto& id : ids) id = pick(rng);
  return Partition::compact(ids);
}

inline Eigen::MatrixXd dense_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edge_list()) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  return a;
}

// Q = 1/2m sum_ij (A_ij - d_i d_j / 2m) delta(c_i, c_j).
inline double modularity_double_sum(const Graph& g, const Partition& p) {
  const Eigen::MatrixXd a = dense_adjacency(g);
  const Eigen::VectorXd d = a.rowwise().sum();
  const double two_m = d.sum();
  double q = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (p[static_cast<std::size_t>(i)] == p[static_cast<std::size_t>(j)]) q += a(i, j) - d(i) * d(j) / two_m;
    }
  }
  return q / two_m;
}

inline Matrix one_hot(const Partition& p) {
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(p.num_nodes()), static_cast<Eigen::Index>(p.num_clusters()));
  for (std::size_t i = 0; i < p.num_nodes(); ++i) x(static_cast<Eigen::Index>(i), p[i]) = 1.0;
  return x;
}

// |H - X_S X_S^T|_F^2 / |S|^2 with H_ij = [label_i == label_j].
inline double aux_frobenius(const Matrix& x, const std::vector<NodeId>& nodes, const std::vector<std::int32_t>& labels) {
  const auto s = static_cast<Eigen::Index>(nodes.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      const double h = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
      const double g = x.row(nodes[static_cast<std::size_t>(i)]).dot(x.row(nodes[static_cast<std::size_t>(j)]));
      total += (h - g) * (h - g);
    }
  }
  return total / static_cast<double>(s * s);
}

// Scalar objective over the weights of a model.
using WeightLoss = std::function<double(const GcnModel&)>;

// Central differences over every weight entry.
inline std::vector<Matrix> finite_difference(const GcnModel& model, const WeightLoss& loss, double h = 1e-6) {
  std::vector<Matrix> grads;
  GcnModel probe = model;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    Matrix g(model.weights[l].rows(), model.weights[l].cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        const double w = model.weights[l](i, j);
        probe.weights[l](i, j) = w + h;
        const double up = loss(probe);
        probe.weights[l](i, j) = w - h;
        const double down = loss(probe);
        probe.weights[l](i, j) = w;
        g(i, j) = (up - down) / (2.0 * h);
      }
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

// max |a - f| / max(|a|, |f|), where entries with both magnitudes below
// `floor` are compared on absolute error instead.
inline double max_relative_error(const std::vector<Matrix>& analytic, const std::vector<Matrix>& numeric,
                                 double floor = 1e-7) {
  double worst = 0.0;
  for (std::size_t l = 0; l < analytic.size(); ++l) {
    for (Eigen::Index i = 0; i < analytic[l].size(); ++i) {
      const double a = analytic[l].data()[i];
      const double f = numeric[l].data()[i];
      const double scale = std::max(std::abs(a), std::abs(f));
      const double err = scale < floor ? std::abs(a - f) : std::abs(a - f) / scale;
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace dgcluster::oracle
