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

#include "dgcluster/losses.hpp"

#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dgcluster/errors.hpp"

namespace dgcluster {
namespace {

void check_node(NodeId u, std::size_t num_nodes, const char* what) {
  if (u < 0 || static_cast<std::size_t>(u) >= num_nodes) {
    throw std::out_of_range(std::string(what) + ": node " + std::to_string(u) + " out of range");
  }
}

}  // namespace

LabelSupervision LabelSupervision::from_labels(std::vector<NodeId> nodes,
                                               std::span<const std::int32_t> raw_labels) {
  if (nodes.size() != raw_labels.size()) throw std::invalid_argument("label supervision: size mismatch");
  std::map<std::int32_t, std::int32_t> classes;
  for (std::int32_t l : raw_labels) {
    if (l < 0) throw std::invalid_argument("label supervision: negative label");
    classes.emplace(l, 0);
  }
  std::int32_t next = 0;
  for (auto& [raw, compact] : classes) compact = next++;
  std::set<NodeId> unique(nodes.begin(), nodes.end());
  if (unique.size() != nodes.size()) throw std::invalid_argument("label supervision: duplicate node");

  LabelSupervision aux;
  aux.nodes = std::move(nodes);
  aux.labels.reserve(raw_labels.size());
  for (std::int32_t l : raw_labels) aux.labels.push_back(classes.at(l));
  aux.num_classes = classes.size();
  return aux;
}

void LabelSupervision::validate(std::size_t num_nodes) const {
  if (nodes.size() != labels.size()) throw std::invalid_argument("label supervision: size mismatch");
  std::vector<bool> seen(num_nodes, false);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    check_node(nodes[i], num_nodes, "label supervision");
    if (seen[static_cast<std::size_t>(nodes[i])]) {
      throw std::invalid_argument("label supervision: duplicate node " + std::to_string(nodes[i]));
    }
    seen[static_cast<std::size_t>(nodes[i])] = true;
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw std::invalid_argument("label supervision: label outside [0, num_classes)");
    }
  }
}

void PairSupervision::validate(std::size_t num_nodes) const {
  for (const auto& [i, j] : pairs) {
    check_node(i, num_nodes, "pair supervision");
    check_node(j, num_nodes, "pair supervision");
    if (i == j) throw std::invalid_argument("pair supervision: pair of a node with itself");
  }
}

std::string LossReport::csv_header() { return "epoch,l1,l2,reg,total,soft_modularity"; }

std::string LossReport::csv_row(std::size_t epoch) const {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << epoch << ',' << l1 << ',' << l2 << ',' << reg << ',' << total << ',' << soft_modularity;
  return out.str();
}

LossTerm modularity_loss(const Matrix& x, const Graph& g) {
  if (g.num_edges() == 0) throw std::invalid_argument("modularity_loss: graph has no edges");
  if (static_cast<std::size_t>(x.rows()) != g.num_nodes()) {
    throw ShapeError("modularity_loss: embedding rows do not match node count");
  }
  const double two_m = 2.0 * static_cast<double>(g.num_edges());
  const Eigen::Index k = x.cols();

  // A X, one CSR row at a time.
  Matrix ax = Matrix::Zero(x.rows(), k);
  for (Eigen::Index u = 0; u < x.rows(); ++u) {
    for (NodeId v : g.neighbors(static_cast<NodeId>(u))) ax.row(u) += x.row(v);
  }
  Eigen::RowVectorXd dx = Eigen::RowVectorXd::Zero(k);  // d^T X
  for (Eigen::Index u = 0; u < x.rows(); ++u) {
    dx += static_cast<double>(g.degrees()[static_cast<std::size_t>(u)]) * x.row(u);
  }
  const double trace_axa = x.cwiseProduct(ax).sum();
  const double trace_null = dx.squaredNorm() / two_m;

  LossTerm term;
  term.value = -(trace_axa - trace_null) / two_m;
  term.gradient.resize(x.rows(), k);
  for (Eigen::Index u = 0; u < x.rows(); ++u) {
    const double d = static_cast<double>(g.degrees()[static_cast<std::size_t>(u)]);
    term.gradient.row(u) = -(2.0 * ax.row(u) - (2.0 / two_m) * d * dx) / two_m;
  }
  return term;
}

LossTerm aux_loss_labels(const Matrix& x, const LabelSupervision& aux) {
  if (aux.nodes.empty()) throw std::invalid_argument("aux_loss_labels: empty node subset");
  aux.validate(static_cast<std::size_t>(x.rows()));
  const Eigen::Index k = x.cols();
  const auto p = static_cast<Eigen::Index>(aux.num_classes);
  const double s = static_cast<double>(aux.nodes.size());

  Matrix gram = Matrix::Zero(k, k);       // X_S^T X_S
  Matrix class_sums = Matrix::Zero(p, k); // C^T X_S
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(p);  // diagonal of C^T C
  for (std::size_t i = 0; i < aux.nodes.size(); ++i) {
    const auto row = x.row(aux.nodes[i]);
    gram.noalias() += row.transpose() * row;
    class_sums.row(aux.labels[i]) += row;
    counts[aux.labels[i]] += 1.0;
  }

  const double trace_hh = counts.squaredNorm();
  const double trace_gg = gram.squaredNorm();
  const double trace_hg = class_sums.squaredNorm();
  const double scale = 1.0 / (s * s);

  LossTerm term;
  term.value = scale * (trace_hh + trace_gg - 2.0 * trace_hg);
  term.gradient = Matrix::Zero(x.rows(), k);
  for (std::size_t i = 0; i < aux.nodes.size(); ++i) {
    const NodeId u = aux.nodes[i];
    term.gradient.row(u) = 4.0 * scale * (x.row(u) * gram - class_sums.row(aux.labels[i]));
  }
  return term;
}

LossTerm aux_loss_pairs(const Matrix& x, const PairSupervision& aux) {
  if (aux.pairs.empty()) throw std::invalid_argument("aux_loss_pairs: empty pair list");
  aux.validate(static_cast<std::size_t>(x.rows()));
  const double scale = 1.0 / static_cast<double>(aux.pairs.size());
  LossTerm term;
  term.gradient = Matrix::Zero(x.rows(), x.cols());
  for (const auto& [i, j] : aux.pairs) {
    const double residual = 1.0 - x.row(i).dot(x.row(j));
    term.value += residual * residual;
    term.gradient.row(i) -= 2.0 * scale * residual * x.row(j);
    term.gradient.row(j) -= 2.0 * scale * residual * x.row(i);
  }
  term.value *= scale;
  return term;
}

LossTerm collapse_regularizer(const Matrix& x, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("collapse_regularizer: alpha must be >= 0");
  LossTerm term;
  term.gradient = Matrix::Zero(x.rows(), x.cols());
  if (x.rows() == 0 || alpha == 0.0) return term;
  const double n = static_cast<double>(x.rows());
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const double sq = mean.squaredNorm();
  term.value = alpha * sq * sq;
  term.gradient.rowwise() = (4.0 * alpha * sq / n) * mean;
  return term;
}

std::pair<LossReport, Matrix> total_loss(const Matrix& x, const Graph& g, const Supervision& aux,
                                         const LossWeights& weights) {
  if (weights.lambda < 0.0 || weights.alpha < 0.0) throw std::invalid_argument("total_loss: negative weight");
  LossTerm l1 = modularity_loss(x, g);
  LossTerm l2;
  if (const auto* labels = std::get_if<LabelSupervision>(&aux)) {
    l2 = aux_loss_labels(x, *labels);
  } else if (const auto* pairs = std::get_if<PairSupervision>(&aux)) {
    l2 = aux_loss_pairs(x, *pairs);
  }
  LossTerm reg = collapse_regularizer(x, weights.alpha);

  LossReport report;
  report.l1 = l1.value;
  report.l2 = l2.value;
  report.reg = reg.value;
  report.total = report.l1 + weights.lambda * report.l2 + report.reg;
  report.soft_modularity = -report.l1;

  Matrix grad = std::move(l1.gradient);
  if (l2.gradient.size() > 0 && weights.lambda != 0.0) grad += weights.lambda * l2.gradient;
  if (weights.alpha != 0.0) grad += reg.gradient;
  return {report, std::move(grad)};
}

}  // namespace dgcluster
