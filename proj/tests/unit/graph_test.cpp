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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "dgcluster/errors.hpp"
#include "dgcluster/graph.hpp"
#include "dgcluster/io.hpp"
#include "dgcluster/sbm.hpp"
#include "oracles.hpp"

namespace dgcluster {
namespace {

using ::testing::ElementsAre;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("dgcluster_graph_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path;
  }

  std::filesystem::path dir_;
};

using LoadTest = TempDir;

TEST_F(LoadTest, Triangle) {
  const Graph g = load_graph(write("e.tsv", "0 1\n1 2\n2 0\n"));
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_THAT(std::vector<std::int64_t>(g.degrees().begin(), g.degrees().end()), ElementsAre(2, 2, 2));
  EXPECT_TRUE(g.check_invariants());
}

TEST_F(LoadTest, DropsDuplicateDirectionAndSelfLoop) {
  const Graph g = load_graph(write("e.tsv", "0 1\n1 0\n0 0\n"));
  EXPECT_EQ(g.num_nodes(), 2u);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_TRUE(g.check_invariants());
}

TEST_F(LoadTest, CommentsTabsAndExplicitNodeCount) {
  const Graph g = load_graph(write("e.tsv", "# header\n0\t1\n\n3\t1\n"), 6);
  EXPECT_EQ(g.num_nodes(), 6u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.degree(5), 0);
}

TEST_F(LoadTest, MalformedLineReportsLineNumber) {
  const auto path = write("e.tsv", "0 1\n# c\n1 x\n");
  try {
    load_graph(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST_F(LoadTest, IdBeyondNodeCountIsBoundsError) {
  EXPECT_THROW(load_graph(write("e.tsv", "0 1\n1 5\n"), 3), std::out_of_range);
}

TEST_F(LoadTest, DenseFeatures) {
  const Matrix x = load_features(write("f.tsv", "1\t1\n1\t1\n1\t1\n"), 3);
  EXPECT_EQ(x.rows(), 3);
  EXPECT_EQ(x.cols(), 2);
  EXPECT_TRUE((x.array() == 1.0).all());
}

TEST_F(LoadTest, SparseFeatures) {
  const Matrix x = load_features(write("f.tsv", "sparse 3 4\n0 2 1.5\n"), 3);
  EXPECT_EQ(x.rows(), 3);
  EXPECT_EQ(x.cols(), 4);
  EXPECT_EQ(x(0, 2), 1.5);
  EXPECT_EQ(x.cwiseAbs().sum(), 1.5);
}

TEST_F(LoadTest, FeatureRowMismatchAndNonFinite) {
  EXPECT_ANY_THROW(load_features(write("a.tsv", "1 2\n3 4\n"), 3));
  EXPECT_THROW(load_features(write("b.tsv", "1 nan\n3 4\n"), 2), ParseError);
  EXPECT_THROW(load_features(write("c.tsv", "1 2\n3\n"), 2), ParseError);
}

TEST_F(LoadTest, Labels) {
  const NodeLabels labels = load_labels(write("l.tsv", "0 0\n1 0\n2 1\n"), 4);
  ASSERT_EQ(labels.size(), 4u);
  EXPECT_EQ(labels[0], 0);
  EXPECT_EQ(labels[2], 1);
  EXPECT_FALSE(labels[3].has_value());
  EXPECT_EQ(labels.num_labeled(), 3u);
  EXPECT_EQ(labels.num_distinct(), 2u);
}

TEST_F(LoadTest, EmptyLabelFileMeansAllUnlabeled) {
  const NodeLabels labels = load_labels(write("l.tsv", ""), 3);
  EXPECT_EQ(labels.num_labeled(), 0u);
}

TEST_F(LoadTest, LabelErrors) {
  EXPECT_ANY_THROW(load_labels(write("a.tsv", "0 0\n0 1\n"), 2));
  EXPECT_ANY_THROW(load_labels(write("b.tsv", "0 -1\n"), 2));
}

TEST_F(LoadTest, PartitionRoundTrip) {
  const Partition p = Partition::compact(std::vector<std::int64_t>{4, 4, 9, 1});
  write_partition(dir_ / "p.tsv", p);
  EXPECT_EQ(load_partition(dir_ / "p.tsv", 4), p);
  EXPECT_ANY_THROW(load_partition(dir_ / "p.tsv", 5));
}

TEST_F(LoadTest, EdgesAndFeaturesRoundTrip) {
  std::mt19937_64 rng(3);
  const Graph g = oracle::random_nonempty_graph(12, 0.3, rng);
  write_edges(dir_ / "e.tsv", g);
  EXPECT_EQ(load_graph(dir_ / "e.tsv", g.num_nodes()).edge_list(), g.edge_list());

  Matrix x = Matrix::Random(5, 3) * 1e3;
  write_features(dir_ / "f.tsv", x);
  EXPECT_EQ(load_features(dir_ / "f.tsv", 5), x);
}

TEST(GraphTest, FromEdgesOutOfRange) {
  const std::vector<std::pair<NodeId, NodeId>> edges = {{0, 3}};
  EXPECT_THROW(Graph::from_edges(3, edges), std::out_of_range);
}

TEST(GraphTest, RandomGraphsSatisfyInvariants) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = oracle::random_graph(1 + trial % 30, 0.25, rng);
    ASSERT_TRUE(g.check_invariants());
    std::int64_t sum = 0;
    for (std::size_t u = 0; u < g.num_nodes(); ++u) {
      sum += g.degree(static_cast<NodeId>(u));
      for (NodeId v : g.neighbors(static_cast<NodeId>(u))) {
        ASSERT_NE(v, static_cast<NodeId>(u));
        ASSERT_TRUE(g.has_edge(v, static_cast<NodeId>(u)));
      }
    }
    EXPECT_EQ(sum, 2 * static_cast<std::int64_t>(g.num_edges()));
  }
}

TEST(PartitionTest, Compact) {
  const Partition p = Partition::compact(std::vector<std::int64_t>{0, 2, 5, 2});
  EXPECT_THAT(std::vector<ClusterId>(p.assignment().begin(), p.assignment().end()), ElementsAre(0, 1, 2, 1));
  EXPECT_EQ(p.num_clusters(), 3u);
  EXPECT_THROW(Partition(std::vector<ClusterId>{0, 2}), std::invalid_argument);
}

TEST(NormalizedAdjacencyTest, Triangle) {
  const std::vector<std::pair<NodeId, NodeId>> edges = {{0, 1}, {1, 2}, {2, 0}};
  const SparseMatrix a = normalized_adjacency(Graph::from_edges(3, edges));
  const Eigen::MatrixXd dense(a);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(dense(i, j), i == j ? 0.0 : 0.5);
  }
}

TEST(NormalizedAdjacencyTest, SingleEdge) {
  const std::vector<std::pair<NodeId, NodeId>> edges = {{0, 1}};
  const Eigen::MatrixXd dense(normalized_adjacency(Graph::from_edges(2, edges)));
  EXPECT_EQ(dense(0, 1), 1.0);
  EXPECT_EQ(dense(1, 0), 1.0);
  EXPECT_EQ(dense(0, 0), 0.0);
}

TEST(NormalizedAdjacencyTest, Star) {
  const std::vector<std::pair<NodeId, NodeId>> edges = {{0, 1}, {0, 2}, {0, 3}};
  const Eigen::MatrixXd dense(normalized_adjacency(Graph::from_edges(4, edges)));
  for (int leaf = 1; leaf < 4; ++leaf) {
    EXPECT_DOUBLE_EQ(dense(0, leaf), 1.0 / std::sqrt(3.0));
    EXPECT_EQ(dense(0, leaf), dense(leaf, 0));
  }
}

TEST(NormalizedAdjacencyTest, ExactEntriesAndIsolatedRows) {
  std::mt19937_64 rng(5);
  const Graph g = oracle::random_graph(25, 0.15, rng);
  const Eigen::MatrixXd dense(normalized_adjacency(g));
  const Eigen::MatrixXd a = oracle::dense_adjacency(g);
  for (Eigen::Index u = 0; u < a.rows(); ++u) {
    for (Eigen::Index v = 0; v < a.cols(); ++v) {
      const double expected =
          a(u, v) == 0.0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(g.degree(static_cast<NodeId>(u)) *
                                                                      g.degree(static_cast<NodeId>(v))));
      ASSERT_EQ(dense(u, v), expected);
    }
  }
}

TEST(SbmTest, CompleteGraphFromOneBlock) {
  const std::vector<std::size_t> blocks = {3};
  const SbmGraph s = generate_sbm(blocks, 1.0, 0.0, 1);
  EXPECT_EQ(s.graph.num_edges(), 3u);
  EXPECT_EQ(s.planted.num_clusters(), 1u);
}

TEST(SbmTest, NoEdgesIsError) {
  const std::vector<std::size_t> blocks = {2, 2};
  EXPECT_THROW(generate_sbm(blocks, 0.0, 0.0, 1), std::invalid_argument);
}

TEST(SbmTest, BadParameters) {
  const std::vector<std::size_t> blocks = {2, 2};
  EXPECT_THROW(generate_sbm(blocks, 0.1, 0.2, 1), std::invalid_argument);
  EXPECT_THROW(generate_sbm({}, 0.5, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(generate_sbm(std::vector<std::size_t>{3, 0}, 0.5, 0.1, 1), std::invalid_argument);
}

TEST(SbmTest, EdgeCountWithinThreeSigma) {
  const std::vector<std::size_t> blocks = {100, 100, 100, 100};
  const double inside_pairs = 4.0 * 100.0 * 99.0 / 2.0;
  const double across_pairs = 6.0 * 100.0 * 100.0;
  const double mean = inside_pairs * 0.1 + across_pairs * 0.01;
  const double sigma = std::sqrt(inside_pairs * 0.1 * 0.9 + across_pairs * 0.01 * 0.99);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SbmGraph s = generate_sbm(blocks, 0.1, 0.01, seed);
    EXPECT_NEAR(static_cast<double>(s.graph.num_edges()), mean, 3.0 * sigma) << "seed " << seed;
    EXPECT_TRUE(s.graph.check_invariants());
  }
}

TEST(SbmTest, InsideAndAcrossRatesMatchProbabilities) {
  const std::vector<std::size_t> blocks = {200, 200};
  const SbmGraph s = generate_sbm(blocks, 0.2, 0.02, 7);
  double inside = 0.0;
  double across = 0.0;
  for (const auto& [u, v] : s.graph.edge_list()) {
    (s.planted[static_cast<std::size_t>(u)] == s.planted[static_cast<std::size_t>(v)] ? inside : across) += 1.0;
  }
  EXPECT_NEAR(inside / (2.0 * 200.0 * 199.0 / 2.0), 0.2, 0.01);
  EXPECT_NEAR(across / (200.0 * 200.0), 0.02, 0.004);
}

TEST(SbmTest, SeedDeterminism) {
  const std::vector<std::size_t> blocks = {30, 40};
  const SbmGraph a = generate_sbm(blocks, 0.3, 0.05, 42);
  const SbmGraph b = generate_sbm(blocks, 0.3, 0.05, 42);
  const SbmGraph c = generate_sbm(blocks, 0.3, 0.05, 43);
  EXPECT_EQ(a.graph.edge_list(), b.graph.edge_list());
  EXPECT_NE(a.graph.edge_list(), c.graph.edge_list());
  const Matrix fa = generate_sbm_features(a.planted, {}, 9);
  const Matrix fb = generate_sbm_features(a.planted, {}, 9);
  EXPECT_EQ(fa, fb);
  EXPECT_EQ(fa.cols(), 2 + 12);
}

}  // namespace
}  // namespace dgcluster
