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
#include <vector>

#include <gtest/gtest.h>

#include "dgcluster/adam.hpp"
#include "dgcluster/checkpoint.hpp"
#include "dgcluster/errors.hpp"
#include "dgcluster/losses.hpp"
#include "dgcluster/nn.hpp"
#include "oracles.hpp"

namespace dgcluster {
namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

// Step-by-step transform of one row, written independently of the library.
std::vector<double> transform_row(std::vector<double> row) {
  double sum = 0.0;
  for (double v : row) sum += v;
  if (std::abs(sum) > 1e-8) {
    for (double& v : row) v /= sum;
  }
  double norm = 0.0;
  for (double& v : row) {
    v = std::tanh(v) * std::tanh(v);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : row) v /= norm;
  return row;
}

TEST(InitTest, GlorotBoundAndDeterminism) {
  const std::vector<std::size_t> dims = {4, 2};
  const GcnModel a = init_model(dims, 17);
  ASSERT_EQ(a.weights.size(), 1u);
  EXPECT_LE(a.weights[0].cwiseAbs().maxCoeff(), 1.0);
  EXPECT_EQ(a.weights[0], init_model(dims, 17).weights[0]);
  EXPECT_NE(a.weights[0], init_model(dims, 18).weights[0]);
}

TEST(InitTest, DefaultArchitectureShapes) {
  const std::vector<std::size_t> dims = {1433, 256, 128, 64};
  const GcnModel m = init_model(dims, 0);
  ASSERT_EQ(m.num_layers(), 3u);
  EXPECT_EQ(m.weights[0].rows(), 1433);
  EXPECT_EQ(m.weights[0].cols(), 256);
  EXPECT_EQ(m.weights[2].rows(), 128);
  EXPECT_EQ(m.weights[2].cols(), 64);
  const double bound = std::sqrt(6.0 / (1433.0 + 256.0));
  EXPECT_LE(m.weights[0].cwiseAbs().maxCoeff(), bound);
  EXPECT_GT(m.weights[0].cwiseAbs().maxCoeff(), 0.9 * bound);
}

TEST(InitTest, BadDims) {
  EXPECT_THROW(init_model(std::vector<std::size_t>{4}, 0), ShapeError);
  EXPECT_THROW(init_model(std::vector<std::size_t>{4, 0, 2}, 0), ShapeError);
}

TEST(SeluTest, Values) {
  EXPECT_EQ(selu(0.0), 0.0);
  EXPECT_EQ(selu(1.0), 1.0507009873554804);
  EXPECT_NEAR(selu(-20.0), -1.7580993408473766, 1e-8);
  EXPECT_NEAR(selu_derivative(-0.3), (selu(-0.3 + 1e-6) - selu(-0.3 - 1e-6)) / 2e-6, 1e-8);
}

TEST(ForwardTest, IsolatedNodeGivesZeros) {
  const Graph g = Graph::from_edges(1, {});
  const GcnModel model = init_model(std::vector<std::size_t>{3, 2}, 1);
  const Matrix out = gcn_forward(model, normalized_adjacency(g), Matrix::Ones(1, 3));
  EXPECT_TRUE((out.array() == 0.0).all());
}

TEST(ForwardTest, SingleEdgeHandEvaluation) {
  const std::vector<std::pair<NodeId, NodeId>> edges = {{0, 1}};
  const Graph g = Graph::from_edges(2, edges);
  GcnModel model;
  model.layer_dims = {1, 1};
  model.weights = {Matrix::Ones(1, 1)};
  const Matrix out = gcn_forward(model, normalized_adjacency(g), Matrix::Ones(2, 1));
  EXPECT_DOUBLE_EQ(out(0, 0), 1.0507009873554804);
  EXPECT_DOUBLE_EQ(out(1, 0), 1.0507009873554804);
}

TEST(ForwardTest, NonFiniteActivationNamesLayer) {
  const std::vector<std::pair<NodeId, NodeId>> edges = {{0, 1}};
  const Graph g = Graph::from_edges(2, edges);
  GcnModel model = init_model(std::vector<std::size_t>{1, 2, 2}, 0);
  model.weights[1](0, 0) = 1e308;
  model.weights[1](1, 0) = 1e308;
  try {
    gcn_forward(model, normalized_adjacency(g), Matrix::Constant(2, 1, 1e3));
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("layer"), std::string::npos);
  }
}

TEST(ForwardTest, FeatureWidthMismatch) {
  const std::vector<std::pair<NodeId, NodeId>> edges = {{0, 1}};
  const Graph g = Graph::from_edges(2, edges);
  const GcnModel model = init_model(std::vector<std::size_t>{3, 2}, 0);
  EXPECT_THROW(gcn_forward(model, normalized_adjacency(g), Matrix::Ones(2, 4)), ShapeError);
}

TEST(TransformTest, IdenticalValuesGiveUniformRow) {
  const Matrix x = transform_embeddings(Matrix::Constant(2, 4, 0.7)).values();
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(x(0, j), 0.5, 1e-15);
}

TEST(TransformTest, MatchesStepByStepChain) {
  Matrix raw(1, 3);
  raw << 1.0, 1.0, 2.0;
  const Matrix x = transform_embeddings(raw).values();
  const std::vector<double> expected = transform_row({1.0, 1.0, 2.0});
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(x(0, j), expected[static_cast<std::size_t>(j)], 1e-12);
  // Intermediate values: [0.25, 0.25, 0.5] -> tanh -> square.
  const double a = std::pow(std::tanh(0.25), 2);
  const double b = std::pow(std::tanh(0.5), 2);
  EXPECT_NEAR(a, 0.0599852, 1e-7);
  EXPECT_NEAR(b, 0.2135523, 1e-7);
  EXPECT_NEAR(x(0, 0), a / std::sqrt(2 * a * a + b * b), 1e-12);
}

TEST(TransformTest, ZeroSumRowSkipsScaling) {
  Matrix raw(1, 2);
  raw << 0.5, -0.5;
  TransformTape tape;
  const Matrix x = transform_embeddings(raw, &tape).values();
  EXPECT_EQ(tape.row_scale[0], 0.0);
  EXPECT_NEAR(x(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(TransformTest, DegenerateRowBecomesUniform) {
  const Matrix x = transform_embeddings(Matrix::Zero(1, 4)).values();
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(x(0, j), 0.5);
}

TEST(TransformTest, RandomRowsAreUnitAndNonnegative) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = transform_embeddings(random_matrix(30, 7, rng, 2.0)).values();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      EXPECT_NEAR(x.row(i).norm(), 1.0, 1e-9);
      EXPECT_GE(x.row(i).minCoeff(), 0.0);
    }
  }
}

TEST(TransformTest, EmbeddingMatrixRejectsInvalidRows) {
  EXPECT_THROW(EmbeddingMatrix(Matrix::Ones(1, 2)), std::invalid_argument);
  Matrix neg(1, 2);
  neg << -0.6, 0.8;
  EXPECT_THROW(EmbeddingMatrix{neg}, std::invalid_argument);
}

TEST(TransformTest, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix raw = random_matrix(5, 4, rng);
    const Matrix upstream = random_matrix(5, 4, rng);
    TransformTape tape;
    transform_embeddings(raw, &tape);
    const Matrix grad = transform_backward(raw, tape, upstream);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
      Matrix up = raw;
      Matrix down = raw;
      up.data()[i] += h;
      down.data()[i] -= h;
      const double fd = (transform_embeddings(up).values().cwiseProduct(upstream).sum() -
                         transform_embeddings(down).values().cwiseProduct(upstream).sum()) /
                        (2.0 * h);
      EXPECT_NEAR(grad.data()[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

class BackwardTest : public ::testing::Test {
 protected:
  void SetUp() override {
    rng_.seed(21);
    graph_ = oracle::random_nonempty_graph(6, 0.5, rng_);
    features_ = random_matrix(6, 4, rng_);
  }

  double objective(const GcnModel& model, const Supervision& aux, const LossWeights& w) const {
    const GcnInput input(normalized_adjacency(graph_), features_);
    return total_loss(embed(model, input).values(), graph_, aux, w).first.total;
  }

  std::vector<Matrix> analytic(const GcnModel& model, const Supervision& aux, const LossWeights& w) const {
    const GcnInput input(normalized_adjacency(graph_), features_);
    GradientTape tape;
    const EmbeddingMatrix x = embed(model, input, &tape);
    return backward(model, input, tape, total_loss(x.values(), graph_, aux, w).second);
  }

  std::mt19937_64 rng_;
  Graph graph_;
  Matrix features_;
};

TEST_F(BackwardTest, SumOfEmbeddingsOneLayer) {
  const GcnModel model = init_model(std::vector<std::size_t>{4, 3}, 5);
  const GcnInput input(normalized_adjacency(graph_), features_);
  GradientTape tape;
  const EmbeddingMatrix x = embed(model, input, &tape);
  const auto grads = backward(model, input, tape, Matrix::Ones(x.values().rows(), x.values().cols()));
  const auto fd = oracle::finite_difference(
      model, [&](const GcnModel& m) { return embed(m, input).values().sum(); });
  EXPECT_LT(oracle::max_relative_error(grads, fd), 1e-5);
}

TEST_F(BackwardTest, ZeroUpstreamGivesZeroGradients) {
  const GcnModel model = init_model(std::vector<std::size_t>{4, 3, 2}, 5);
  const GcnInput input(normalized_adjacency(graph_), features_);
  GradientTape tape;
  embed(model, input, &tape);
  for (const Matrix& g : backward(model, input, tape, Matrix::Zero(6, 2))) EXPECT_TRUE((g.array() == 0.0).all());
}

TEST_F(BackwardTest, ModularityLoss) {
  const GcnModel model = init_model(std::vector<std::size_t>{4, 3, 2}, 6);
  const LossWeights w;
  const auto fd = oracle::finite_difference(model, [&](const GcnModel& m) { return objective(m, {}, w); });
  EXPECT_LT(oracle::max_relative_error(analytic(model, {}, w), fd), 1e-4);
}

TEST_F(BackwardTest, AllTermsWithLabels) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GcnModel model = init_model(std::vector<std::size_t>{4, 5, 3}, seed);
    const Supervision aux = LabelSupervision::from_labels({0, 2, 3, 5}, std::vector<std::int32_t>{1, 0, 1, 2});
    const LossWeights w{0.5, 0.1};
    const auto fd = oracle::finite_difference(model, [&](const GcnModel& m) { return objective(m, aux, w); });
    EXPECT_LT(oracle::max_relative_error(analytic(model, aux, w), fd), 1e-4) << "seed " << seed;
  }
}

TEST_F(BackwardTest, AllTermsWithPairs) {
  const GcnModel model = init_model(std::vector<std::size_t>{4, 3, 2}, 9);
  const Supervision aux = PairSupervision{{{0, 1}, {2, 4}, {1, 5}}};
  const LossWeights w{0.8, 0.3};
  const auto fd = oracle::finite_difference(model, [&](const GcnModel& m) { return objective(m, aux, w); });
  EXPECT_LT(oracle::max_relative_error(analytic(model, aux, w), fd), 1e-4);
}

TEST(AdamTest, ZeroGradientLeavesWeights) {
  GcnModel model = init_model(std::vector<std::size_t>{3, 2}, 1);
  const GcnModel before = model;
  AdamState adam(model);
  const std::vector<Matrix> grads = {Matrix::Zero(3, 2)};
  adam.step(model, grads);
  EXPECT_EQ(model.weights[0], before.weights[0]);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  GcnModel model;
  model.layer_dims = {1, 1};
  model.weights = {Matrix::Constant(1, 1, 0.3)};
  AdamState adam(model);
  const std::vector<Matrix> grads = {Matrix::Constant(1, 1, 2.5)};
  adam.step(model, grads);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  EXPECT_NEAR(model.weights[0](0, 0), 0.3 - 1e-3 * 2.5 / (2.5 + 1e-8), 1e-15);
  const double after_one = model.weights[0](0, 0);
  adam.step(model, grads);
  EXPECT_LT(model.weights[0](0, 0), after_one);
}

TEST(AdamTest, RejectsBadGradientsWithoutMutation) {
  GcnModel model = init_model(std::vector<std::size_t>{3, 2}, 1);
  const GcnModel before = model;
  AdamState adam(model);
  EXPECT_THROW(adam.step(model, std::vector<Matrix>{Matrix::Zero(2, 2)}), ShapeError);
  Matrix bad = Matrix::Zero(3, 2);
  bad(1, 1) = std::nan("");
  EXPECT_THROW(adam.step(model, std::vector<Matrix>{bad}), NumericError);
  EXPECT_EQ(model.weights[0], before.weights[0]);
  EXPECT_EQ(adam.steps(), 0);
}

TEST(CheckpointTest, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "dgcluster_checkpoint_test.tsv";
  const GcnModel model = init_model(std::vector<std::size_t>{5, 4, 3}, 12);
  save_model(path, model);
  const GcnModel loaded = load_model(path);
  EXPECT_EQ(loaded.layer_dims, model.layer_dims);
  for (std::size_t l = 0; l < model.weights.size(); ++l) EXPECT_EQ(loaded.weights[l], model.weights[l]);
  std::filesystem::remove(path);
}

TEST(CheckpointTest, RejectsBadHeader) {
  const auto path = std::filesystem::temp_directory_path() / "dgcluster_checkpoint_bad.tsv";
  std::ofstream(path) << "not-a-model\t1\n";
  EXPECT_THROW(load_model(path), ParseError);
  std::filesystem::remove(path);
}

TEST(DeterminismTest, TrainingStepsAreBitIdentical) {
  std::mt19937_64 rng(4);
  const Graph g = oracle::random_nonempty_graph(20, 0.2, rng);
  const Matrix features = random_matrix(20, 5, rng);
  const GcnInput input(normalized_adjacency(g), features);
  auto run = [&] {
    GcnModel model = init_model(std::vector<std::size_t>{5, 6, 3}, 77);
    AdamState adam(model);
    for (int epoch = 0; epoch < 10; ++epoch) {
      GradientTape tape;
      const EmbeddingMatrix x = embed(model, input, &tape);
      adam.step(model, backward(model, input, tape, total_loss(x.values(), g, {}, {}).second));
    }
    return model;
  };
  const GcnModel a = run();
  const GcnModel b = run();
  for (std::size_t l = 0; l < a.weights.size(); ++l) EXPECT_EQ(a.weights[l], b.weights[l]);
}

}  // namespace
}  // namespace dgcluster
