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

#include "dgcluster/nn.hpp"

#include <string>

#include <spdlog/spdlog.h>

#include "dgcluster/errors.hpp"
#include "dgcluster/random.hpp"

namespace dgcluster {
namespace {

constexpr double kRowSumGuard = 1e-8;
constexpr double kDegenerateNorm = 1e-12;
constexpr double kUnitTolerance = 1e-9;

Matrix apply_selu(const Matrix& z) {
  return z.unaryExpr([](double v) { return selu(v); });
}

}  // namespace

void GcnModel::validate() const {
  if (layer_dims.size() < 2) throw ShapeError("model needs at least an input and an output dimension");
  if (weights.size() + 1 != layer_dims.size()) {
    throw ShapeError("model has " + std::to_string(weights.size()) + " weight matrices for " +
                     std::to_string(layer_dims.size()) + " dimensions");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (static_cast<std::size_t>(weights[l].rows()) != layer_dims[l] ||
        static_cast<std::size_t>(weights[l].cols()) != layer_dims[l + 1]) {
      throw ShapeError("weight " + std::to_string(l) + " has shape " + std::to_string(weights[l].rows()) +
                       "x" + std::to_string(weights[l].cols()));
    }
    if (!weights[l].allFinite()) throw NumericError("weight " + std::to_string(l) + " is not finite");
  }
}

GcnModel init_model(std::span<const std::size_t> layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2) throw ShapeError("init_model: need at least two dimensions");
  for (std::size_t d : layer_dims) {
    if (d == 0) throw ShapeError("init_model: zero dimension");
  }
  GcnModel model;
  model.layer_dims.assign(layer_dims.begin(), layer_dims.end());
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t fan_in = layer_dims[l];
    const std::size_t fan_out = layer_dims[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(static_cast<Eigen::Index>(fan_in), static_cast<Eigen::Index>(fan_out));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
    }
    model.weights.push_back(std::move(w));
  }
  return model;
}

GcnInput::GcnInput(SparseMatrix normalized_adjacency, Matrix features)
    : adjacency_(std::move(normalized_adjacency)), features_(std::move(features)) {
  if (adjacency_.rows() != adjacency_.cols() || adjacency_.rows() != features_.rows()) {
    throw ShapeError("adjacency is " + std::to_string(adjacency_.rows()) + "x" +
                     std::to_string(adjacency_.cols()) + " but features have " +
                     std::to_string(features_.rows()) + " rows");
  }
  if (!features_.allFinite()) throw NumericError("features contain non-finite values");
  propagated_features_ = adjacency_ * features_;
}

EmbeddingMatrix::EmbeddingMatrix(Matrix values) : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    if (std::abs(values_.row(i).norm() - 1.0) > kUnitTolerance || values_.row(i).minCoeff() < 0.0) {
      throw std::invalid_argument("embedding row " + std::to_string(i) +
                                  " is not a nonnegative unit vector");
    }
  }
}

Matrix gcn_forward(const GcnModel& model, const GcnInput& input, GradientTape* tape) {
  if (model.layer_dims.empty() || static_cast<Eigen::Index>(model.input_dim()) != input.features().cols()) {
    throw ShapeError("model expects " + std::to_string(model.layer_dims.empty() ? 0 : model.input_dim()) +
                     " input features, got " + std::to_string(input.features().cols()));
  }
  if (tape) {
    tape->propagated.assign(model.num_layers(), Matrix());
    tape->pre_activations.assign(model.num_layers(), Matrix());
  }

  Matrix h;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    Matrix z;
    if (l == 0) {
      z = input.propagated_features() * model.weights[0];
    } else {
      Matrix propagated = input.adjacency() * h;
      z = propagated * model.weights[l];
      if (tape) tape->propagated[l] = std::move(propagated);
    }
    h = apply_selu(z);
    if (!h.allFinite()) throw NumericError("non-finite activation in layer " + std::to_string(l));
    if (tape) tape->pre_activations[l] = std::move(z);
  }
  if (tape) tape->raw = h;
  return h;
}

Matrix gcn_forward(const GcnModel& model, const SparseMatrix& normalized_adjacency,
                   const Matrix& features, GradientTape* tape) {
  return gcn_forward(model, GcnInput(normalized_adjacency, features), tape);
}

EmbeddingMatrix transform_embeddings(const Matrix& raw, TransformTape* tape) {
  const Eigen::Index n = raw.rows();
  const Eigen::Index k = raw.cols();
  if (k == 0) throw ShapeError("transform_embeddings: zero embedding dimension");
  Matrix out(n, k);
  if (tape) {
    tape->tanh_values.resize(n, k);
    tape->row_scale.assign(static_cast<std::size_t>(n), 0.0);
    tape->row_norm.assign(static_cast<std::size_t>(n), 0.0);
    tape->degenerate.assign(static_cast<std::size_t>(n), false);
  }

  std::size_t unscaled = 0;
  std::size_t degenerate = 0;
  const double uniform = 1.0 / std::sqrt(static_cast<double>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sum = raw.row(i).sum();
    Eigen::RowVectorXd t;
    if (std::abs(sum) > kRowSumGuard) {
      t = (raw.row(i) / sum).array().tanh();
    } else {
      t = raw.row(i).array().tanh();
      ++unscaled;
    }
    const Eigen::RowVectorXd q = t.array().square();
    const double norm = q.norm();
    if (norm < kDegenerateNorm) {
      out.row(i).setConstant(uniform);
      ++degenerate;
    } else {
      out.row(i) = q / norm;
    }
    if (tape) {
      const auto r = static_cast<std::size_t>(i);
      tape->tanh_values.row(i) = t;
      tape->row_scale[r] = std::abs(sum) > kRowSumGuard ? sum : 0.0;
      tape->row_norm[r] = norm;
      tape->degenerate[r] = norm < kDegenerateNorm;
    }
  }
  if (unscaled > 0) {
    spdlog::warn("transform_embeddings: {} row(s) with |row sum| <= {:g}, sum normalization skipped",
                 unscaled, kRowSumGuard);
  }
  if (degenerate > 0) {
    spdlog::warn("transform_embeddings: {} degenerate row(s) replaced by the uniform vector", degenerate);
  }
  if (tape) tape->output = out;
  return EmbeddingMatrix(std::move(out));
}

Matrix transform_backward(const Matrix& raw, const TransformTape& tape, const Matrix& grad_output) {
  if (grad_output.rows() != raw.rows() || grad_output.cols() != raw.cols() ||
      tape.output.rows() != raw.rows()) {
    throw ShapeError("transform_backward: shape mismatch");
  }
  Matrix grad(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const auto r = static_cast<std::size_t>(i);
    if (tape.degenerate[r]) {
      grad.row(i).setZero();
      continue;
    }
    const auto y = tape.output.row(i);
    const auto gy = grad_output.row(i);
    // d(q/|q|): project out the radial component.
    const Eigen::RowVectorXd gq = (gy - y * y.dot(gy)) / tape.row_norm[r];
    const auto t = tape.tanh_values.row(i).array();
    const Eigen::RowVectorXd ga = gq.array() * 2.0 * t * (1.0 - t.square());
    const double scale = tape.row_scale[r];
    if (scale != 0.0) {
      // a = x / s  =>  dx_j = (da_j - sum_i da_i a_i) / s
      const double dot = ga.dot(raw.row(i) / scale);
      grad.row(i) = (ga.array() - dot) / scale;
    } else {
      grad.row(i) = ga;
    }
  }
  return grad;
}

std::vector<Matrix> backward(const GcnModel& model, const GcnInput& input, const GradientTape& tape,
                             const Matrix& grad_embeddings) {
  const std::size_t layers = model.num_layers();
  if (tape.pre_activations.size() != layers || tape.propagated.size() != layers) {
    throw ShapeError("backward: tape was recorded for a different model");
  }
  Matrix grad = transform_backward(tape.raw, tape.transform, grad_embeddings);
  std::vector<Matrix> grads(layers);
  for (std::size_t l = layers; l-- > 0;) {
    const Matrix& z = tape.pre_activations[l];
    if (z.rows() != grad.rows() || z.cols() != grad.cols()) throw ShapeError("backward: tape shape mismatch");
    const Matrix grad_z = grad.cwiseProduct(z.unaryExpr([](double v) { return selu_derivative(v); }));
    const Matrix& propagated = l == 0 ? input.propagated_features() : tape.propagated[l];
    grads[l] = propagated.transpose() * grad_z;
    if (l > 0) {
      const Matrix grad_propagated = grad_z * model.weights[l].transpose();
      // Ã is symmetric.
      grad = input.adjacency() * grad_propagated;
    }
  }
  return grads;
}

EmbeddingMatrix embed(const GcnModel& model, const GcnInput& input, GradientTape* tape) {
  const Matrix raw = gcn_forward(model, input, tape);
  return transform_embeddings(raw, tape ? &tape->transform : nullptr);
}

}  // namespace dgcluster
