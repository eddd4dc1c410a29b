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

// Command line front end: train, eval, generate and scaling subcommands.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dgcluster/checkpoint.hpp"
#include "dgcluster/io.hpp"
#include "dgcluster/pipeline.hpp"

namespace {

using dgcluster::RunConfig;

struct TrainFlags {
  std::string config;
  std::string edges;
  std::string features;
  std::string labels;
  std::string partition;
  std::string pairs;
  std::vector<std::size_t> dims;
  std::size_t epochs = 0;
  double lr = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;
  std::string aux;
  double label_fraction = 0.0;
  double threshold = 0.0;
  std::size_t branching = 0;
  std::vector<std::uint64_t> seeds;
  std::size_t f1_sample_size = 0;
  std::string out;
  std::string run_id;
};

// Flags given on the command line override the JSON config.
RunConfig make_config(const TrainFlags& f, const CLI::App& cmd) {
  RunConfig c = f.config.empty() ? RunConfig{} : RunConfig::from_json_file(f.config);
  auto set = [&cmd](const char* name) { return cmd.count(name) > 0; };
  if (set("--edges")) c.edges = f.edges;
  if (set("--features")) c.features = f.features;
  if (set("--labels")) c.labels = f.labels;
  if (set("--partition")) c.external_partition = f.partition;
  if (set("--pairs")) c.pairs = f.pairs;
  if (set("--dims")) c.hidden_dims = f.dims;
  if (set("--epochs")) c.epochs = f.epochs;
  if (set("--lr")) c.learning_rate = f.lr;
  if (set("--lambda")) c.lambda = f.lambda;
  if (set("--alpha")) c.alpha = f.alpha;
  if (set("--aux")) c.aux_mode = dgcluster::parse_aux_mode(f.aux);
  if (set("--label-fraction")) c.label_fraction = f.label_fraction;
  if (set("--birch-threshold")) c.birch.threshold = f.threshold;
  if (set("--branching")) c.birch.branching_factor = f.branching;
  if (set("--seeds")) c.seeds = f.seeds;
  if (set("--f1-sample-size")) c.f1_sample_size = f.f1_sample_size;
  if (set("--out")) c.output_dir = f.out;
  if (set("--run-id")) c.run_id = f.run_id;
  // Labels alone imply label supervision once lambda is positive.
  if (!set("--aux") && c.aux_mode == dgcluster::AuxMode::kNone && c.lambda > 0.0) {
    if (c.pairs) {
      c.aux_mode = dgcluster::AuxMode::kPairs;
    } else if (c.labels) {
      c.aux_mode = dgcluster::AuxMode::kLabels;
    } else if (c.external_partition) {
      c.aux_mode = dgcluster::AuxMode::kExternalPartition;
    }
  }
  return c;
}

nlohmann::json report_json(const dgcluster::MetricsReport& m) {
  nlohmann::json j = {{"q", m.q}, {"conductance", m.conductance}, {"k_found", m.k_found}};
  j["nmi"] = m.nmi ? nlohmann::json(*m.nmi) : nlohmann::json(nullptr);
  j["f1"] = m.f1 ? nlohmann::json(*m.f1) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph clustering by differentiable modularity maximization"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress");

  // train
  TrainFlags tf;
  CLI::App* train = app.add_subcommand("train", "Train one model per seed and cluster the embeddings");
  train->add_option("--config", tf.config, "JSON config; flags override its keys")->check(CLI::ExistingFile);
  train->add_option("--edges", tf.edges, "Edge list (u v per line)");
  train->add_option("--features", tf.features, "Feature file (dense rows or sparse triplets)");
  train->add_option("--labels", tf.labels, "Node labels (node label per line)");
  train->add_option("--partition", tf.partition, "External partition used as auxiliary labels");
  train->add_option("--pairs", tf.pairs, "Same-cluster node pairs (u v per line)");
  train->add_option("--dims", tf.dims, "Layer widths after the input, e.g. 256 128 64")->expected(1, -1);
  train->add_option("--epochs", tf.epochs, "Training epochs (300)");
  train->add_option("--lr", tf.lr, "Adam learning rate (0.001)");
  train->add_option("--lambda", tf.lambda, "Auxiliary loss weight (0)");
  train->add_option("--alpha", tf.alpha, "Collapse regularizer weight (0)");
  train->add_option("--aux", tf.aux, "none|labels|pairs|external-partition");
  train->add_option("--label-fraction", tf.label_fraction, "Fraction of labels revealed per seed (0.1)");
  train->add_option("--birch-threshold", tf.threshold, "BIRCH subcluster radius threshold (0.5)");
  train->add_option("--branching", tf.branching, "BIRCH branching factor (50)");
  train->add_option("--seeds", tf.seeds, "Seeds (0..9)")->expected(1, -1);
  train->add_option("--f1-sample-size", tf.f1_sample_size, "Nodes sampled for pairwise F1 (1000)");
  train->add_option("--out", tf.out, "Output directory (dgcluster_out)");
  train->add_option("--run-id", tf.run_id, "run_id column of metrics.csv");

  // eval
  std::string eval_model, eval_edges, eval_features, eval_labels, eval_partition_out;
  dgcluster::BirchParams eval_birch;
  std::uint64_t eval_seed = 0;
  std::size_t eval_f1_size = dgcluster::kDefaultF1SampleSize;
  CLI::App* eval = app.add_subcommand("eval", "Cluster and score a dataset with a saved model");
  eval->add_option("--model", eval_model, "Checkpoint written by train")->required()->check(CLI::ExistingFile);
  eval->add_option("--edges", eval_edges, "Edge list")->required();
  eval->add_option("--features", eval_features, "Feature file")->required();
  eval->add_option("--labels", eval_labels, "Node labels");
  eval->add_option("--birch-threshold", eval_birch.threshold, "BIRCH threshold (0.5)");
  eval->add_option("--branching", eval_birch.branching_factor, "BIRCH branching factor (50)");
  eval->add_option("--seed", eval_seed, "Training seed, selects the F1 sample (0)");
  eval->add_option("--f1-sample-size", eval_f1_size, "Nodes sampled for pairwise F1 (1000)");
  eval->add_option("--partition-out", eval_partition_out, "Write the partition here");

  // generate
  dgcluster::SbmSpec spec;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* generate = app.add_subcommand("generate", "Write a stochastic block model dataset");
  generate->add_option("--blocks", spec.block_sizes, "Block sizes (100 100 100 100)")->expected(1, -1);
  generate->add_option("--p-in", spec.p_in, "Edge probability inside a block (0.1)");
  generate->add_option("--p-out", spec.p_out, "Edge probability across blocks (0.01)");
  generate->add_option("--extra-dims", spec.features.extra_dims, "Pure-noise feature columns");
  generate->add_option("--noise", spec.features.noise_stddev, "Gaussian noise stddev on every feature");
  generate->add_option("--seed", gen_seed, "Seed (0)");
  generate->add_option("--out", gen_out, "Output directory")->required();

  // scaling
  std::vector<std::size_t> sizes = {1000, 2000, 4000};
  dgcluster::ScalingOptions scaling_opts;
  std::string scaling_out = "scaling.csv";
  CLI::App* scaling = app.add_subcommand("scaling", "Time training epochs on growing block model graphs");
  scaling->add_option("--sizes", sizes, "Node counts, ascending")->expected(1, -1);
  scaling->add_option("--block-size", scaling_opts.block_size, "Nodes per block (100)");
  scaling->add_option("--degree", scaling_opts.average_degree, "Expected average degree (10)");
  scaling->add_option("--feature-dim", scaling_opts.feature_dim, "Random feature columns (32)");
  scaling->add_option("--dims", scaling_opts.hidden_dims, "Layer widths after the input")->expected(1, -1);
  scaling->add_option("--epochs", scaling_opts.timed_epochs, "Timed epochs per size (5)");
  scaling->add_option("--seed", scaling_opts.seed, "Seed (0)");
  scaling->add_option("--out", scaling_out, "Output CSV");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*train) {
      const RunConfig config = make_config(tf, *train);
      const auto summary = dgcluster::run_experiment(config);
      std::cout << dgcluster::metrics_csv_header() << '\n'
                << dgcluster::metrics_csv_row(config.run_id, "mean", config.lambda, config.alpha, summary.mean)
                << '\n'
                << dgcluster::metrics_csv_row(config.run_id, "std", config.lambda, config.alpha, summary.stddev)
                << '\n';
      if (summary.failed > 0) {
        std::cerr << summary.failed << " seed(s) failed, see failures.csv\n";
        return summary.failed == summary.results.size() ? 1 : 0;
      }
    } else if (*eval) {
      dgcluster::Dataset data;
      data.graph = dgcluster::load_graph(eval_edges);
      data.features = dgcluster::load_features(eval_features, data.graph.num_nodes());
      if (!eval_labels.empty()) data.labels = dgcluster::load_labels(eval_labels, data.graph.num_nodes());
      const dgcluster::GcnModel model = dgcluster::load_model(eval_model);
      const auto result = dgcluster::evaluate_model(model, data, eval_birch, dgcluster::f1_seed_for(eval_seed),
                                                    eval_f1_size);
      if (!eval_partition_out.empty()) dgcluster::write_partition(eval_partition_out, result.partition);
      std::cout << report_json(result.metrics).dump(2) << '\n';
    } else if (*generate) {
      const auto data = dgcluster::write_generated_dataset(spec, gen_seed, gen_out);
      std::cout << "n=" << data.sbm.graph.num_nodes() << " m=" << data.sbm.graph.num_edges()
                << " blocks=" << spec.block_sizes.size() << '\n';
    } else if (*scaling) {
      const auto rows = dgcluster::run_scaling(sizes, scaling_opts);
      dgcluster::write_scaling_csv(scaling_out, rows);
      for (const auto& r : rows) std::cout << r.n << ' ' << r.seconds_per_epoch << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
