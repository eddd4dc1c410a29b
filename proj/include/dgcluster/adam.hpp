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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dgcluster/nn.hpp"

namespace dgcluster {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction over all weight matrices of a GcnModel.
class AdamState {
 public:
  AdamState(const GcnModel& model, AdamOptions options = {});

  // Throws ShapeError on mismatched gradients and NumericError on non-finite
  // ones; the model is left untouched in both cases.
  void step(GcnModel& model, std::span<const Matrix> grads);

  std::int64_t steps() const noexcept { return steps_; }
  const AdamOptions& options() const noexcept { return options_; }
  const std::vector<Matrix>& first_moments() const noexcept { return m_; }
  const std::vector<Matrix>& second_moments() const noexcept { return v_; }

 private:
  AdamOptions options_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::int64_t steps_ = 0;
};

}  // namespace dgcluster
