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

// Model checkpoints are tab-separated text:
//
//   dgcluster-model  1
//   dims   r  h1  ...  k
//   layer  0  rows  cols
//   <rows lines of cols values>
//   layer  1  rows  cols
//   ...
//
// Values are written with 17 significant digits so weights round-trip
// exactly.

#pragma once

#include <filesystem>

#include "dgcluster/nn.hpp"

namespace dgcluster {

inline constexpr int kCheckpointVersion = 1;

void save_model(const std::filesystem::path& path, const GcnModel& model);

// Throws ParseError on malformed files or an unsupported version.
GcnModel load_model(const std::filesystem::path& path);

}  // namespace dgcluster
