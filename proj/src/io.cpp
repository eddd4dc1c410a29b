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

#include "dgcluster/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "dgcluster/errors.hpp"

namespace dgcluster {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

// Line-oriented reader that skips comments and tracks line numbers.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path)
      : in_(open_input(path)), source_(path.string()) {}

  // Returns false at EOF.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (is_blank_or_comment(line_)) continue;
      fields = split_fields(line_);
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_no_; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

  template <typename T>
  T parse_int(std::string_view field) const {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      fail("expected integer, got '" + std::string(field) + "'");
    }
    return value;
  }

  double parse_real(std::string_view field) const {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      fail("expected number, got '" + std::string(field) + "'");
    }
    if (!std::isfinite(value)) fail("non-finite value '" + std::string(field) + "'");
    return value;
  }

  const std::string& source() const { return source_; }

 private:
  std::ifstream in_;
  std::string source_;
  std::string line_;
  std::size_t line_no_ = 0;
};

// Reads "node  value" pairs into a per-node table; duplicates are errors.
std::vector<std::optional<std::int64_t>> read_node_table(const std::filesystem::path& path,
                                                         std::size_t num_nodes,
                                                         const char* what) {
  LineReader reader(path);
  std::vector<std::optional<std::int64_t>> table(num_nodes);
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 2) reader.fail("expected 'node_id " + std::string(what) + "'");
    const auto node = reader.parse_int<std::int64_t>(fields[0]);
    const auto value = reader.parse_int<std::int64_t>(fields[1]);
    if (node < 0 || static_cast<std::size_t>(node) >= num_nodes) {
      reader.fail("node id " + std::to_string(node) + " outside [0, " + std::to_string(num_nodes) + ")");
    }
    if (value < 0) reader.fail("negative " + std::string(what));
    if (value > std::numeric_limits<std::int32_t>::max()) reader.fail(std::string(what) + " too large");
    auto& slot = table[static_cast<std::size_t>(node)];
    if (slot) reader.fail("duplicate node id " + std::to_string(node));
    slot = value;
  }
  return table;
}

}  // namespace

Graph load_graph(const std::filesystem::path& edge_path, std::optional<std::size_t> num_nodes) {
  LineReader reader(edge_path);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::int64_t max_id = -1;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 2) reader.fail("expected 'u v'");
    const auto u = reader.parse_int<std::int64_t>(fields[0]);
    const auto v = reader.parse_int<std::int64_t>(fields[1]);
    if (u < 0 || v < 0) reader.fail("negative node id");
    if (num_nodes && (static_cast<std::size_t>(u) >= *num_nodes ||
                      static_cast<std::size_t>(v) >= *num_nodes)) {
      throw std::out_of_range(reader.source() + ":" + std::to_string(reader.line()) +
                              ": node id exceeds num_nodes=" + std::to_string(*num_nodes));
    }
    if (std::max(u, v) > std::numeric_limits<NodeId>::max()) reader.fail("node id too large");
    max_id = std::max({max_id, u, v});
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  const std::size_t n = num_nodes ? *num_nodes : static_cast<std::size_t>(max_id + 1);
  return Graph::from_edges(n, edges);
}

Matrix load_features(const std::filesystem::path& path, std::size_t num_nodes) {
  LineReader reader(path);
  std::vector<std::string_view> fields;
  if (!reader.next(fields)) {
    if (num_nodes == 0) return Matrix(0, 0);
    throw ParseError(path.string(), 0, "empty feature file, expected " + std::to_string(num_nodes) + " rows");
  }

  if (fields[0] == "sparse") {
    if (fields.size() != 3) reader.fail("expected header 'sparse n r'");
    const auto rows = reader.parse_int<std::int64_t>(fields[1]);
    const auto cols = reader.parse_int<std::int64_t>(fields[2]);
    if (rows < 0 || cols <= 0) reader.fail("invalid sparse header dimensions");
    if (static_cast<std::size_t>(rows) != num_nodes) {
      reader.fail("feature rows " + std::to_string(rows) + " != node count " + std::to_string(num_nodes));
    }
    Matrix features = Matrix::Zero(rows, cols);
    while (reader.next(fields)) {
      if (fields.size() != 3) reader.fail("expected 'i j value'");
      const auto i = reader.parse_int<std::int64_t>(fields[0]);
      const auto j = reader.parse_int<std::int64_t>(fields[1]);
      if (i < 0 || i >= rows || j < 0 || j >= cols) reader.fail("triplet index out of range");
      features(i, j) = reader.parse_real(fields[2]);
    }
    return features;
  }

  std::vector<std::vector<double>> rows;
  do {
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(reader.parse_real(f));
    if (!rows.empty() && row.size() != rows.front().size()) {
      reader.fail("row has " + std::to_string(row.size()) + " columns, expected " +
                  std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  } while (reader.next(fields));

  if (rows.size() != num_nodes) {
    throw ParseError(path.string(), reader.line(),
                     "feature rows " + std::to_string(rows.size()) + " != node count " +
                         std::to_string(num_nodes));
  }
  Matrix features(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return features;
}

NodeLabels load_labels(const std::filesystem::path& path, std::size_t num_nodes) {
  const auto table = read_node_table(path, num_nodes, "label_id");
  std::vector<std::optional<std::int32_t>> labels(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    if (table[i]) labels[i] = static_cast<std::int32_t>(*table[i]);
  }
  return NodeLabels(std::move(labels));
}

Partition load_partition(const std::filesystem::path& path, std::size_t num_nodes) {
  const auto table = read_node_table(path, num_nodes, "cluster_id");
  std::vector<std::int64_t> ids(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    if (!table[i]) {
      throw ParseError(path.string(), 0, "node " + std::to_string(i) + " has no cluster id");
    }
    ids[i] = *table[i];
  }
  return Partition::compact(ids);
}

void write_edges(const std::filesystem::path& path, const Graph& g) {
  auto out = open_output(path);
  for (const auto& [u, v] : g.edge_list()) out << u << '\t' << v << '\n';
}

void write_labels(const std::filesystem::path& path, const NodeLabels& labels) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) out << i << '\t' << *labels[i] << '\n';
  }
}

void write_partition(const std::filesystem::path& path, const Partition& p) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < p.num_nodes(); ++i) out << i << '\t' << p[i] << '\n';
}

void write_features(const std::filesystem::path& path, const Matrix& features) {
  auto out = open_output(path);
  out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (j > 0) out << '\t';
      out << features(i, j);
    }
    out << '\n';
  }
}

}  // namespace dgcluster
