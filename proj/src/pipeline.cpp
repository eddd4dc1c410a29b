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

#include "dgcluster/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dgcluster/adam.hpp"
#include "dgcluster/checkpoint.hpp"
#include "dgcluster/errors.hpp"
#include "dgcluster/io.hpp"
#include "dgcluster/random.hpp"

namespace dgcluster {
namespace {

using json = nlohmann::json;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Chooses round(fraction * count) items, at least one when fraction > 0.
template <typename T>
std::vector<T> random_subset(std::vector<T> items, double fraction, std::uint64_t seed) {
  if (fraction >= 1.0 || items.empty()) return items;
  auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(items.size())));
  if (fraction > 0.0) take = std::max<std::size_t>(take, 1);
  Rng rng(seed);
  std::shuffle(items.begin(), items.end(), rng);
  items.resize(take);
  std::sort(items.begin(), items.end());
  return items;
}

std::vector<std::pair<NodeId, NodeId>> load_pairs(const std::filesystem::path& path, std::size_t num_nodes) {
  // The edge reader already handles comments, parsing and bounds.
  const Graph g = load_graph(path, num_nodes);
  return g.edge_list();
}

double scaled(double v) { return std::round(v * 1000.0) / 10.0; }

std::string format_score(std::optional<double> v) {
  if (!v) return "";
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << scaled(*v);
  return out.str();
}

json metrics_to_json(const MetricsReport& m) {
  json j = {{"q", m.q}, {"conductance", m.conductance}, {"k_found", m.k_found}};
  j["nmi"] = m.nmi ? json(*m.nmi) : json(nullptr);
  j["f1"] = m.f1 ? json(*m.f1) : json(nullptr);
  return j;
}

template <typename Get>
std::pair<std::optional<double>, std::optional<double>> mean_std(const std::vector<const SeedResult*>& rs, Get get) {
  std::vector<double> values;
  for (const SeedResult* r : rs) {
    if (auto v = get(*r)) values.push_back(*v);
  }
  if (values.empty()) return {std::nullopt, std::nullopt};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd};
}

}  // namespace

AuxMode parse_aux_mode(const std::string& name) {
  if (name == "none") return AuxMode::kNone;
  if (name == "labels") return AuxMode::kLabels;
  if (name == "pairs") return AuxMode::kPairs;
  if (name == "external-partition") return AuxMode::kExternalPartition;
  throw std::invalid_argument("unknown aux mode '" + name + "' (none|labels|pairs|external-partition)");
}

std::string to_string(AuxMode mode) {
  switch (mode) {
    case AuxMode::kNone: return "none";
    case AuxMode::kLabels: return "labels";
    case AuxMode::kPairs: return "pairs";
    case AuxMode::kExternalPartition: return "external-partition";
  }
  return "none";
}

void RunConfig::validate() const {
  if (edges.empty() || features.empty()) throw std::invalid_argument("config: edges and features are required");
  if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("config: learning rate must be > 0");
  if (lambda < 0.0 || alpha < 0.0) throw std::invalid_argument("config: lambda and alpha must be >= 0");
  if (!(label_fraction >= 0.0 && label_fraction <= 1.0)) {
    throw std::invalid_argument("config: label_fraction must be in [0, 1]");
  }
  if (hidden_dims.empty()) throw std::invalid_argument("config: need at least one layer");
  if (std::find(hidden_dims.begin(), hidden_dims.end(), std::size_t{0}) != hidden_dims.end()) {
    throw std::invalid_argument("config: zero layer width");
  }
  if (seeds.empty()) throw std::invalid_argument("config: no seeds");
  birch.validate();
  if (pairs && aux_mode != AuxMode::kPairs) {
    throw std::invalid_argument("config: a pairs file is only used with aux mode 'pairs'");
  }
  switch (aux_mode) {
    case AuxMode::kNone:
      break;
    case AuxMode::kLabels:
      if (!labels) throw std::invalid_argument("config: aux mode 'labels' needs a labels file");
      if (label_fraction == 0.0) throw std::invalid_argument("config: aux mode 'labels' needs label_fraction > 0");
      break;
    case AuxMode::kPairs:
      if (!pairs && !labels) throw std::invalid_argument("config: aux mode 'pairs' needs a pairs or labels file");
      if (!pairs && label_fraction == 0.0) throw std::invalid_argument("config: aux mode 'pairs' needs label_fraction > 0");
      break;
    case AuxMode::kExternalPartition:
      if (!external_partition) throw std::invalid_argument("config: aux mode 'external-partition' needs a partition file");
      if (label_fraction == 0.0) throw std::invalid_argument("config: external partition needs label_fraction > 0");
      break;
  }
  if (lambda > 0.0 && aux_mode == AuxMode::kNone) {
    spdlog::warn("lambda = {} has no effect without an aux mode", lambda);
  }
}

RunConfig RunConfig::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  static const std::vector<std::string> known = {
      "edges", "features", "labels", "partition", "pairs", "dims", "epochs", "lr", "lambda", "alpha", "aux",
      "label_fraction", "birch_threshold", "branching", "seeds", "out", "run_id", "f1_sample_size"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  RunConfig c;
  if (j.contains("edges")) c.edges = j["edges"].get<std::string>();
  if (j.contains("features")) c.features = j["features"].get<std::string>();
  if (j.contains("labels")) c.labels = j["labels"].get<std::string>();
  if (j.contains("partition")) c.external_partition = j["partition"].get<std::string>();
  if (j.contains("pairs")) c.pairs = j["pairs"].get<std::string>();
  if (j.contains("dims")) c.hidden_dims = j["dims"].get<std::vector<std::size_t>>();
  if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
  if (j.contains("lr")) c.learning_rate = j["lr"].get<double>();
  if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
  if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
  if (j.contains("aux")) c.aux_mode = parse_aux_mode(j["aux"].get<std::string>());
  if (j.contains("label_fraction")) c.label_fraction = j["label_fraction"].get<double>();
  if (j.contains("birch_threshold")) c.birch.threshold = j["birch_threshold"].get<double>();
  if (j.contains("branching")) c.birch.branching_factor = j["branching"].get<std::size_t>();
  if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("out")) c.output_dir = j["out"].get<std::string>();
  if (j.contains("run_id")) c.run_id = j["run_id"].get<std::string>();
  if (j.contains("f1_sample_size")) c.f1_sample_size = j["f1_sample_size"].get<std::size_t>();
  return c;
}

RunConfig RunConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_string(buffer.str());
}

Dataset load_dataset(const RunConfig& config) {
  Dataset data;
  data.graph = load_graph(config.edges);
  const std::size_t n = data.graph.num_nodes();
  data.features = load_features(config.features, n);
  if (config.labels) data.labels = load_labels(*config.labels, n);
  if (config.external_partition) data.external_partition = load_partition(*config.external_partition, n);
  if (config.pairs) data.pairs = PairSupervision{load_pairs(*config.pairs, n)};
  if (data.graph.num_edges() == 0) throw std::invalid_argument("dataset: graph has no edges");
  const auto isolated = std::count(data.graph.degrees().begin(), data.graph.degrees().end(), std::int64_t{0});
  if (isolated > 0) spdlog::warn("dataset: {} isolated node(s)", isolated);
  return data;
}

Supervision build_supervision(const Dataset& data, const RunConfig& config, std::uint64_t seed) {
  const std::uint64_t subset_seed = derive_seed(seed, SeedStream::kLabelSubset);
  auto labeled_subset = [&](const NodeLabels& source) {
    std::vector<NodeId> nodes = random_subset(source.labeled_nodes(), config.label_fraction, subset_seed);
    std::vector<std::int32_t> raw;
    raw.reserve(nodes.size());
    for (NodeId u : nodes) raw.push_back(*source[static_cast<std::size_t>(u)]);
    return LabelSupervision::from_labels(std::move(nodes), raw);
  };

  switch (config.aux_mode) {
    case AuxMode::kNone:
      return std::monostate{};
    case AuxMode::kLabels:
      if (!data.labels) throw std::invalid_argument("aux mode 'labels' without labels");
      return labeled_subset(*data.labels);
    case AuxMode::kExternalPartition:
      if (!data.external_partition) throw std::invalid_argument("aux mode 'external-partition' without partition");
      return labeled_subset(NodeLabels::from_partition(*data.external_partition));
    case AuxMode::kPairs: {
      if (data.pairs) return *data.pairs;
      if (!data.labels) throw std::invalid_argument("aux mode 'pairs' without pairs or labels");
      // Each revealed node is paired with a random revealed node of the same label.
      const LabelSupervision revealed = labeled_subset(*data.labels);
      std::map<std::int32_t, std::vector<NodeId>> by_label;
      for (std::size_t i = 0; i < revealed.nodes.size(); ++i) by_label[revealed.labels[i]].push_back(revealed.nodes[i]);
      Rng rng(derive_seed(seed, SeedStream::kPairs));
      PairSupervision pairs;
      for (const auto& [label, members] : by_label) {
        if (members.size() < 2) continue;
        std::uniform_int_distribution<std::size_t> pick(0, members.size() - 2);
        for (std::size_t i = 0; i < members.size(); ++i) {
          std::size_t j = pick(rng);
          if (j >= i) ++j;
          pairs.pairs.emplace_back(members[i], members[j]);
        }
      }
      if (pairs.pairs.empty()) throw std::invalid_argument("aux mode 'pairs': no same-label pairs in the revealed subset");
      return pairs;
    }
  }
  return std::monostate{};
}

std::vector<std::size_t> layer_dims_for(const Dataset& data, const RunConfig& config) {
  std::vector<std::size_t> dims{static_cast<std::size_t>(data.features.cols())};
  dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
  return dims;
}

std::uint64_t f1_seed_for(std::uint64_t seed) { return derive_seed(seed, SeedStream::kF1Sample); }

EvalResult evaluate_model(const GcnModel& model, const Dataset& data, const BirchParams& birch,
                          std::uint64_t f1_seed, std::size_t f1_sample_size) {
  model.validate();
  if (static_cast<Eigen::Index>(model.input_dim()) != data.features.cols()) {
    throw ShapeError("model expects " + std::to_string(model.input_dim()) + " features, dataset has " +
                     std::to_string(data.features.cols()));
  }
  const GcnInput input(normalized_adjacency(data.graph), data.features);
  EvalResult result;
  result.embeddings = embed(model, input);
  const Partition fitted = birch_fit(result.embeddings.values(), birch);
  std::vector<std::int64_t> ids(fitted.assignment().begin(), fitted.assignment().end());
  result.partition = assign_singletons(ids, data.graph);
  result.metrics = evaluate_partition(data.graph, result.partition, data.labels ? &*data.labels : nullptr,
                                      f1_seed, f1_sample_size);
  return result;
}

SeedResult train_seed(const Dataset& data, const RunConfig& config, std::uint64_t seed) {
  SeedResult result;
  result.seed = seed;
  const Supervision aux = build_supervision(data, config, seed);
  const LossWeights weights{config.lambda, config.alpha};
  const GcnInput input(normalized_adjacency(data.graph), data.features);

  result.model = init_model(layer_dims_for(data, config), derive_seed(seed, SeedStream::kInit));
  AdamState adam(result.model, AdamOptions{.learning_rate = config.learning_rate});
  result.history.reserve(config.epochs);

  try {
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      GradientTape tape;
      const EmbeddingMatrix x = embed(result.model, input, &tape);
      auto [report, grad] = total_loss(x.values(), data.graph, aux, weights);
      if (!std::isfinite(report.total)) throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
      result.history.push_back(report);
      const std::vector<Matrix> grads = backward(result.model, input, tape, grad);
      adam.step(result.model, grads);
    }
  } catch (const NumericError& e) {
    result.failure = e.what();
    spdlog::error("seed {} diverged: {}", seed, e.what());
    return result;
  }

  EvalResult eval = evaluate_model(result.model, data, config.birch, f1_seed_for(seed), config.f1_sample_size);
  result.embeddings = std::move(eval.embeddings);
  result.partition = std::move(eval.partition);
  result.metrics = eval.metrics;
  return result;
}

std::string metrics_csv_header() { return "run_id,seed,lambda,alpha,k_found,Q,C,NMI,F1"; }

std::string metrics_csv_row(const std::string& run_id, const std::string& seed, double lambda, double alpha,
                            const MetricsReport& m) {
  std::ostringstream out;
  out << run_id << ',' << seed << ',' << lambda << ',' << alpha << ',' << m.k_found << ','
      << format_score(m.q) << ',' << format_score(m.conductance) << ',' << format_score(m.nmi) << ','
      << format_score(m.f1);
  return out.str();
}

RunSummary run_experiment(const RunConfig& config) {
  config.validate();
  const Dataset data = load_dataset(config);
  std::filesystem::create_directories(config.output_dir);

  RunSummary summary;
  std::vector<std::pair<std::uint64_t, std::string>> failures;
  for (std::uint64_t seed : config.seeds) {
    spdlog::info("training seed {} ({} epochs)", seed, config.epochs);
    SeedResult r = train_seed(data, config, seed);
    const auto dir = config.output_dir / ("seed_" + std::to_string(seed));
    std::filesystem::create_directories(dir);
    {
      auto out = open_output(dir / "loss.csv");
      out << LossReport::csv_header() << '\n';
      for (std::size_t e = 0; e < r.history.size(); ++e) out << r.history[e].csv_row(e) << '\n';
    }
    if (r.failure) {
      failures.emplace_back(seed, *r.failure);
      ++summary.failed;
    } else {
      write_partition(dir / "partition.tsv", r.partition);
      save_model(dir / "model.tsv", r.model);
      open_output(dir / "metrics.json") << metrics_to_json(r.metrics).dump(2) << '\n';
    }
    summary.results.push_back(std::move(r));
  }

  std::vector<const SeedResult*> ok;
  for (const SeedResult& r : summary.results) {
    if (!r.failure) ok.push_back(&r);
  }
  auto [q_mean, q_sd] = mean_std(ok, [](const SeedResult& r) -> std::optional<double> { return r.metrics.q; });
  auto [c_mean, c_sd] = mean_std(ok, [](const SeedResult& r) -> std::optional<double> { return r.metrics.conductance; });
  auto [k_mean, k_sd] = mean_std(ok, [](const SeedResult& r) -> std::optional<double> {
    return static_cast<double>(r.metrics.k_found);
  });
  auto [nmi_mean, nmi_sd] = mean_std(ok, [](const SeedResult& r) { return r.metrics.nmi; });
  auto [f1_mean, f1_sd] = mean_std(ok, [](const SeedResult& r) { return r.metrics.f1; });
  summary.mean = MetricsReport{q_mean.value_or(0.0), c_mean.value_or(0.0), nmi_mean, f1_mean,
                               static_cast<std::size_t>(std::llround(k_mean.value_or(0.0)))};
  summary.stddev = MetricsReport{q_sd.value_or(0.0), c_sd.value_or(0.0), nmi_sd, f1_sd,
                                 static_cast<std::size_t>(std::llround(k_sd.value_or(0.0)))};

  auto out = open_output(config.output_dir / "metrics.csv");
  out << metrics_csv_header() << '\n';
  for (const SeedResult* r : ok) {
    out << metrics_csv_row(config.run_id, std::to_string(r->seed), config.lambda, config.alpha, r->metrics) << '\n';
  }
  if (!ok.empty()) {
    out << metrics_csv_row(config.run_id, "mean", config.lambda, config.alpha, summary.mean) << '\n';
    out << metrics_csv_row(config.run_id, "std", config.lambda, config.alpha, summary.stddev) << '\n';
  }
  if (!failures.empty()) {
    auto f = open_output(config.output_dir / "failures.csv");
    f << "seed,reason\n";
    for (const auto& [seed, reason] : failures) f << seed << ",\"" << reason << "\"\n";
  }
  return summary;
}

GeneratedDataset generate_dataset(const SbmSpec& spec, std::uint64_t seed) {
  GeneratedDataset out{generate_sbm(spec.block_sizes, spec.p_in, spec.p_out, derive_seed(seed, SeedStream::kGraph)),
                       Matrix()};
  out.features = generate_sbm_features(out.sbm.planted, spec.features, derive_seed(seed, SeedStream::kFeatures));
  return out;
}

GeneratedDataset write_generated_dataset(const SbmSpec& spec, std::uint64_t seed,
                                         const std::filesystem::path& out_dir) {
  GeneratedDataset data = generate_dataset(spec, seed);
  std::filesystem::create_directories(out_dir);
  write_edges(out_dir / "edges.tsv", data.sbm.graph);
  write_labels(out_dir / "labels.tsv", NodeLabels::from_partition(data.sbm.planted));
  write_features(out_dir / "features.tsv", data.features);
  return data;
}

std::vector<ScalingRow> run_scaling(const std::vector<std::size_t>& sizes, const ScalingOptions& options) {
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw std::invalid_argument("scaling: sizes must be ascending");
  if (options.block_size == 0 || options.timed_epochs == 0) throw std::invalid_argument("scaling: bad options");
  using clock = std::chrono::steady_clock;
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };

  std::vector<ScalingRow> rows;
  for (std::size_t n : sizes) {
    if (n < options.block_size) throw std::invalid_argument("scaling: size smaller than one block");
    std::vector<std::size_t> blocks(n / options.block_size, options.block_size);
    blocks.back() += n % options.block_size;
    const double inside = options.average_degree * options.internal_fraction;
    const double outside = options.average_degree - inside;
    const double p_in = std::min(1.0, inside / static_cast<double>(options.block_size - 1));
    const double p_out = blocks.size() > 1
                             ? std::min(p_in, outside / static_cast<double>(n - options.block_size))
                             : 0.0;
    const SbmGraph sbm = generate_sbm(blocks, p_in, p_out, derive_seed(options.seed + n, SeedStream::kGraph));

    Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(options.feature_dim));
    Rng rng(derive_seed(options.seed + n, SeedStream::kFeatures));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      for (Eigen::Index j = 0; j < features.cols(); ++j) features(i, j) = normal(rng);
    }

    const GcnInput input(normalized_adjacency(sbm.graph), features);
    std::vector<std::size_t> dims{options.feature_dim};
    dims.insert(dims.end(), options.hidden_dims.begin(), options.hidden_dims.end());
    GcnModel model = init_model(dims, derive_seed(options.seed, SeedStream::kInit));
    AdamState adam(model);
    const Supervision none;
    const LossWeights weights;

    std::vector<double> epoch_times;
    std::vector<double> loss_times;
    // One untimed warm-up epoch.
    for (std::size_t e = 0; e <= options.timed_epochs; ++e) {
      const auto t0 = clock::now();
      GradientTape tape;
      const EmbeddingMatrix x = embed(model, input, &tape);
      const auto t1 = clock::now();
      auto [report, grad] = total_loss(x.values(), sbm.graph, none, weights);
      const auto t2 = clock::now();
      adam.step(model, backward(model, input, tape, grad));
      const auto t3 = clock::now();
      if (e == 0) continue;
      epoch_times.push_back(std::chrono::duration<double>(t3 - t0).count());
      loss_times.push_back(std::chrono::duration<double>(t2 - t1).count());
    }
    rows.push_back(ScalingRow{n, sbm.graph.num_edges(), options.timed_epochs, median(epoch_times), median(loss_times)});
  }
  return rows;
}

void write_scaling_csv(const std::filesystem::path& path, const std::vector<ScalingRow>& rows) {
  auto out = open_output(path);
  out << "n,m,epochs,seconds_per_epoch,loss_seconds_per_epoch\n";
  out.precision(6);
  for (const auto& r : rows) {
    out << r.n << ',' << r.m << ',' << r.epochs << ',' << r.seconds_per_epoch << ',' << r.loss_seconds_per_epoch << '\n';
  }
}

}  // namespace dgcluster
