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

#include "dgcluster/checkpoint.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "dgcluster/errors.hpp"

namespace dgcluster {
namespace {

constexpr const char* kMagic = "dgcluster-model";

}  // namespace

void save_model(const std::filesystem::path& path, const GcnModel& model) {
  model.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(std::numeric_limits<double>::max_digits10);
  out << kMagic << '\t' << kCheckpointVersion << '\n';
  out << "dims";
  for (std::size_t d : model.layer_dims) out << '\t' << d;
  out << '\n';
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const Matrix& w = model.weights[l];
    out << "layer\t" << l << '\t' << w.rows() << '\t' << w.cols() << '\n';
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        if (j > 0) out << '\t';
        out << w(i, j);
      }
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

GcnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string source = path.string();
  std::size_t line_no = 0;
  std::string line;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError(source, line_no, "unexpected end of file");
    ++line_no;
    return std::istringstream(line);
  };

  GcnModel model;
  {
    auto fields = next_line();
    std::string magic;
    int version = 0;
    if (!(fields >> magic >> version) || magic != kMagic) {
      throw ParseError(source, line_no, "not a dgcluster model checkpoint");
    }
    if (version != kCheckpointVersion) {
      throw ParseError(source, line_no, "unsupported checkpoint version " + std::to_string(version));
    }
  }
  {
    auto fields = next_line();
    std::string tag;
    fields >> tag;
    if (tag != "dims") throw ParseError(source, line_no, "expected 'dims'");
    std::size_t d = 0;
    while (fields >> d) model.layer_dims.push_back(d);
    if (model.layer_dims.size() < 2) throw ParseError(source, line_no, "need at least two dims");
  }
  for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
    auto header = next_line();
    std::string tag;
    std::size_t index = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    if (!(header >> tag >> index >> rows >> cols) || tag != "layer" || index != l ||
        static_cast<std::size_t>(rows) != model.layer_dims[l] ||
        static_cast<std::size_t>(cols) != model.layer_dims[l + 1]) {
      throw ParseError(source, line_no, "bad layer header for layer " + std::to_string(l));
    }
    Matrix w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      auto values = next_line();
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (!(values >> w(i, j))) throw ParseError(source, line_no, "expected " + std::to_string(cols) + " values");
      }
    }
    model.weights.push_back(std::move(w));
  }
  model.validate();
  return model;
}

}  // namespace dgcluster
