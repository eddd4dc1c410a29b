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

// GCN encoder and the embedding transform that maps its output onto the
// nonnegative part of the unit sphere.
//
//   H_{l+1} = selu(Ã H_l W_l)          l = 0 .. L-1, SELU on every layer
//   X_i     = normalize(tanh(H_L,i / sum_j H_L,ij) ^ 2)
//
// Gradients are propagated by hand: the loss hands dL/dX to backward(), which
// walks the transform and then each layer in reverse.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dgcluster/graph.hpp"

namespace dgcluster {

inline constexpr double kSeluScale = 1.0507009873554804;  // lambda in SELU
inline constexpr double kSeluAlpha = 1.6732632423543772;

inline double selu(double x) {
  return x >= 0.0 ? kSeluScale * x : kSeluScale * kSeluAlpha * (std::exp(x) - 1.0);
}

inline double selu_derivative(double x) {
  return x >= 0.0 ? kSeluScale : kSeluScale * kSeluAlpha * std::exp(x);
}

struct GcnModel {
  // Feature dimension followed by each layer's output width.
  std::vector<std::size_t> layer_dims;
  // weights[l] is layer_dims[l] x layer_dims[l + 1].
  std::vector<Matrix> weights;

  std::size_t num_layers() const noexcept { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }

  // Throws ShapeError / NumericError when the shape chain or values are bad.
  void validate() const;
};

// Glorot-uniform initialization, U(-b, b) with b = sqrt(6 / (fan_in + fan_out)).
GcnModel init_model(std::span<const std::size_t> layer_dims, std::uint64_t seed);

// Graph-side inputs of the encoder. Ã X0 does not depend on the weights, so it
// is computed once here and reused every epoch.
class GcnInput {
 public:
  GcnInput(SparseMatrix normalized_adjacency, Matrix features);

  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  const Matrix& features() const noexcept { return features_; }
  const Matrix& propagated_features() const noexcept { return propagated_features_; }
  std::size_t num_nodes() const noexcept { return static_cast<std::size_t>(features_.rows()); }

 private:
  SparseMatrix adjacency_;
  Matrix features_;
  Matrix propagated_features_;
};

// Per-row bookkeeping of transform_embeddings, needed by the backward pass.
struct TransformTape {
  Matrix tanh_values;             // tanh(scaled row)
  Matrix output;                  // final unit rows
  std::vector<double> row_scale;  // row sum used in step 1, 0 if step 1 was skipped
  std::vector<double> row_norm;   // L2 norm before the final normalization
  std::vector<bool> degenerate;   // row replaced by the uniform vector
};

// Intermediates recorded by a forward pass.
struct GradientTape {
  std::vector<Matrix> propagated;       // Ã H_l, one per layer
  std::vector<Matrix> pre_activations;  // Ã H_l W_l
  Matrix raw;                           // H_L
  TransformTape transform;
};

// Nonnegative unit-norm rows; cos(X_u, X_v) = X_u . X_v.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Throws std::invalid_argument unless every row has unit norm (1e-9) and
  // nonnegative entries.
  explicit EmbeddingMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  std::size_t num_nodes() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.cols()); }

 private:
  Matrix values_;
};

// Runs every layer; records intermediates on `tape` if non-null.
// Throws NumericError naming the layer if an activation is not finite.
Matrix gcn_forward(const GcnModel& model, const GcnInput& input, GradientTape* tape = nullptr);
Matrix gcn_forward(const GcnModel& model, const SparseMatrix& normalized_adjacency,
                   const Matrix& features, GradientTape* tape = nullptr);

// Row-wise: divide by the row sum (skipped when |sum| <= 1e-8), tanh, square,
// L2-normalize. Rows whose squared values have norm < 1e-12 become the
// uniform vector 1/sqrt(k). Warnings are logged once per call with counts.
EmbeddingMatrix transform_embeddings(const Matrix& raw, TransformTape* tape = nullptr);

// Vector-Jacobian product of transform_embeddings.
Matrix transform_backward(const Matrix& raw, const TransformTape& tape, const Matrix& grad_output);

// dLoss/dW for every layer given dLoss/dX on the transformed embeddings.
std::vector<Matrix> backward(const GcnModel& model, const GcnInput& input, const GradientTape& tape,
                             const Matrix& grad_embeddings);

// Convenience: forward + transform, recording everything backward() needs.
EmbeddingMatrix embed(const GcnModel& model, const GcnInput& input, GradientTape* tape = nullptr);

}  // namespace dgcluster
