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

#include "dgcluster/adam.hpp"

#include <cmath>
#include <string>

#include "dgcluster/errors.hpp"

namespace dgcluster {

AdamState::AdamState(const GcnModel& model, AdamOptions options) : options_(options) {
  if (!(options_.learning_rate > 0.0)) throw std::invalid_argument("adam: learning rate must be > 0");
  for (const Matrix& w : model.weights) {
    m_.push_back(Matrix::Zero(w.rows(), w.cols()));
    v_.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
}

void AdamState::step(GcnModel& model, std::span<const Matrix> grads) {
  if (grads.size() != model.weights.size() || grads.size() != m_.size()) {
    throw ShapeError("adam: got " + std::to_string(grads.size()) + " gradients for " +
                     std::to_string(model.weights.size()) + " weights");
  }
  for (std::size_t l = 0; l < grads.size(); ++l) {
    if (grads[l].rows() != model.weights[l].rows() || grads[l].cols() != model.weights[l].cols()) {
      throw ShapeError("adam: gradient " + std::to_string(l) + " shape mismatch");
    }
    if (!grads[l].allFinite()) throw NumericError("adam: gradient " + std::to_string(l) + " is not finite");
  }

  ++steps_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t l = 0; l < grads.size(); ++l) {
    m_[l] = b1 * m_[l] + (1.0 - b1) * grads[l];
    v_[l] = b2 * v_[l] + (1.0 - b2) * grads[l].cwiseAbs2();
    model.weights[l].array() -= options_.learning_rate * (m_[l].array() / correction1) /
                                ((v_[l].array() / correction2).sqrt() + options_.epsilon);
  }
}

}  // namespace dgcluster
