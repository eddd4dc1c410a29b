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

// End-to-end runs: load a dataset, train one model per seed, cluster the
// final embeddings and write the artifacts.
//
// Output directory layout of run_experiment():
//
//   metrics.csv              run_id,seed,lambda,alpha,k_found,Q,C,NMI,F1
//                            one row per seed, then "mean" and "std" rows;
//                            scores x100 with one decimal
//   failures.csv             seed,reason (only if some seed diverged)
//   seed_<s>/loss.csv        epoch,l1,l2,reg,total,soft_modularity
//   seed_<s>/partition.tsv   node_id  cluster_id
//   seed_<s>/model.tsv       checkpoint (see checkpoint.hpp)
//   seed_<s>/metrics.json    unrounded metrics

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dgcluster/birch.hpp"
#include "dgcluster/graph.hpp"
#include "dgcluster/losses.hpp"
#include "dgcluster/metrics.hpp"
#include "dgcluster/nn.hpp"
#include "dgcluster/sbm.hpp"

namespace dgcluster {

enum class AuxMode { kNone, kLabels, kPairs, kExternalPartition };

AuxMode parse_aux_mode(const std::string& name);
std::string to_string(AuxMode mode);

struct RunConfig {
  std::filesystem::path edges;
  std::filesystem::path features;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> external_partition;
  std::optional<std::filesystem::path> pairs;  // "u v" lines, pair aux mode

  // Layer widths after the input dimension; the input width comes from the
  // feature file.
  std::vector<std::size_t> hidden_dims = {256, 128, 64};
  std::size_t epochs = 300;
  double learning_rate = 1e-3;
  double lambda = 0.0;
  double alpha = 0.0;
  AuxMode aux_mode = AuxMode::kNone;
  // Fraction of the supervision source revealed as S, drawn per seed.
  double label_fraction = 0.1;
  BirchParams birch;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t f1_sample_size = kDefaultF1SampleSize;
  std::filesystem::path output_dir = "dgcluster_out";
  std::string run_id = "dgcluster";

  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;

  // Reads a JSON object; keys mirror the CLI flag names (see README).
  static RunConfig from_json_file(const std::filesystem::path& path);
  static RunConfig from_json_string(const std::string& text);
};

struct Dataset {
  Graph graph;
  Matrix features;
  std::optional<NodeLabels> labels;
  std::optional<Partition> external_partition;
  std::optional<PairSupervision> pairs;
};

// Loads and cross-checks all files named by the config.
Dataset load_dataset(const RunConfig& config);

// The auxiliary data for one seed (empty when aux_mode is kNone).
Supervision build_supervision(const Dataset& data, const RunConfig& config, std::uint64_t seed);

std::vector<std::size_t> layer_dims_for(const Dataset& data, const RunConfig& config);

struct SeedResult {
  std::uint64_t seed = 0;
  GcnModel model;
  std::vector<LossReport> history;
  EmbeddingMatrix embeddings;
  Partition partition;
  MetricsReport metrics;
  std::optional<std::string> failure;  // set when training diverged
};

// Trains a fresh model for one seed and evaluates the resulting clustering.
SeedResult train_seed(const Dataset& data, const RunConfig& config, std::uint64_t seed);

struct EvalResult {
  EmbeddingMatrix embeddings;
  Partition partition;
  MetricsReport metrics;
};

// Forward pass, transform, BIRCH and metrics without training. Throws
// ShapeError if the model's input width does not match the features.
EvalResult evaluate_model(const GcnModel& model, const Dataset& data, const BirchParams& birch,
                          std::uint64_t f1_seed, std::size_t f1_sample_size = kDefaultF1SampleSize);

struct RunSummary {
  std::vector<SeedResult> results;
  MetricsReport mean;
  MetricsReport stddev;
  std::size_t failed = 0;
};

// Runs every configured seed and writes the artifacts listed above.
RunSummary run_experiment(const RunConfig& config);

// Seed-specific stream for pairwise-F1 sampling (shared by train and eval).
std::uint64_t f1_seed_for(std::uint64_t seed);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& run_id, const std::string& seed, double lambda, double alpha,
                            const MetricsReport& m);

struct SbmSpec {
  std::vector<std::size_t> block_sizes = {100, 100, 100, 100};
  double p_in = 0.1;
  double p_out = 0.01;
  SbmFeatureOptions features;
};

struct GeneratedDataset {
  SbmGraph sbm;
  Matrix features;
};

// Graph and features come from independent streams of `seed`.
GeneratedDataset generate_dataset(const SbmSpec& spec, std::uint64_t seed);

// Writes edges.tsv, labels.tsv (planted blocks) and features.tsv.
GeneratedDataset write_generated_dataset(const SbmSpec& spec, std::uint64_t seed,
                                         const std::filesystem::path& out_dir);

struct ScalingOptions {
  std::size_t block_size = 100;
  double average_degree = 10.0;
  double internal_fraction = 0.8;  // share of a node's expected degree inside its block
  std::size_t feature_dim = 32;
  std::vector<std::size_t> hidden_dims = {256, 128, 64};
  std::size_t timed_epochs = 5;
  std::uint64_t seed = 0;
};

struct ScalingRow {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t epochs = 0;
  double seconds_per_epoch = 0.0;       // median full training epoch
  double loss_seconds_per_epoch = 0.0;  // median total_loss evaluation
};

// Sizes must be ascending. Blocks hold block_size nodes; the last one takes
// any remainder.
std::vector<ScalingRow> run_scaling(const std::vector<std::size_t>& sizes, const ScalingOptions& options);

void write_scaling_csv(const std::filesystem::path& path, const std::vector<ScalingRow>& rows);

}  // namespace dgcluster
