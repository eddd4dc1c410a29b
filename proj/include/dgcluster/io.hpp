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

// Plain-text dataset formats. All ids are 0-based, fields are separated by
// tabs or spaces, and lines starting with '#' are comments.
//
//   edges.tsv      "u  v"                     one undirected edge per line
//   features.tsv   dense rows of r values, or a first line "sparse n r"
//                  followed by "i  j  value" triplets
//   labels.tsv     "node_id  label_id"        missing nodes are unlabeled
//   partition.tsv  "node_id  cluster_id"      every node exactly once

#pragma once

#include <filesystem>
#include <optional>

#include "dgcluster/graph.hpp"

namespace dgcluster {

// If num_nodes is empty the node count is max id + 1.
Graph load_graph(const std::filesystem::path& edge_path,
                 std::optional<std::size_t> num_nodes = std::nullopt);

Matrix load_features(const std::filesystem::path& path, std::size_t num_nodes);

NodeLabels load_labels(const std::filesystem::path& path, std::size_t num_nodes);

Partition load_partition(const std::filesystem::path& path, std::size_t num_nodes);

void write_edges(const std::filesystem::path& path, const Graph& g);
void write_labels(const std::filesystem::path& path, const NodeLabels& labels);
void write_partition(const std::filesystem::path& path, const Partition& p);
// Dense TSV, full round-trip precision.
void write_features(const std::filesystem::path& path, const Matrix& features);

}  // namespace dgcluster
