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

// Python bindings. Matrices cross as float64 numpy arrays, partitions as
// int32 arrays and labels as int32 arrays with -1 for unlabeled nodes.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dgcluster/birch.hpp"
#include "dgcluster/checkpoint.hpp"
#include "dgcluster/errors.hpp"
#include "dgcluster/graph.hpp"
#include "dgcluster/io.hpp"
#include "dgcluster/losses.hpp"
#include "dgcluster/metrics.hpp"
#include "dgcluster/nn.hpp"
#include "dgcluster/pipeline.hpp"
#include "dgcluster/sbm.hpp"

namespace py = pybind11;
using namespace dgcluster;

namespace {

using IdArray = py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>;

Graph graph_from_edges(std::size_t n, const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& e) {
  if (e.size() != 0 && (e.ndim() != 2 || e.shape(1) != 2)) throw ShapeError("edges must have shape (m, 2)");
  std::vector<std::pair<NodeId, NodeId>> edges;
  const auto v = e.unchecked();
  for (py::ssize_t i = 0; e.size() != 0 && i < e.shape(0); ++i) {
    edges.emplace_back(static_cast<NodeId>(v(i, 0)), static_cast<NodeId>(v(i, 1)));
  }
  return Graph::from_edges(n, edges);
}

py::array_t<std::int64_t> edges_array(const Graph& g) {
  const auto edges = g.edge_list();
  py::array_t<std::int64_t> out({static_cast<py::ssize_t>(edges.size()), py::ssize_t{2}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    w(static_cast<py::ssize_t>(i), 0) = edges[i].first;
    w(static_cast<py::ssize_t>(i), 1) = edges[i].second;
  }
  return out;
}

IdArray partition_array(const Partition& p) {
  IdArray out(static_cast<py::ssize_t>(p.num_nodes()));
  std::copy(p.assignment().begin(), p.assignment().end(), out.mutable_data());
  return out;
}

Partition partition_from(const IdArray& ids) {
  std::vector<std::int64_t> raw(ids.data(), ids.data() + ids.size());
  return Partition::compact(raw);
}

NodeLabels labels_from(const IdArray& ids) {
  std::vector<std::optional<std::int32_t>> labels(static_cast<std::size_t>(ids.size()));
  for (py::ssize_t i = 0; i < ids.size(); ++i) {
    if (ids.data()[i] >= 0) labels[static_cast<std::size_t>(i)] = ids.data()[i];
  }
  return NodeLabels(std::move(labels));
}

IdArray labels_array(const NodeLabels& labels) {
  IdArray out(static_cast<py::ssize_t>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) out.mutable_data()[i] = labels[i].value_or(-1);
  return out;
}

py::tuple loss_tuple(const LossTerm& t) { return py::make_tuple(t.value, t.gradient); }

py::dict metrics_dict(const MetricsReport& m) {
  py::dict d;
  d["q"] = m.q;
  d["conductance"] = m.conductance;
  d["nmi"] = m.nmi ? py::cast(*m.nmi) : py::none();
  d["f1"] = m.f1 ? py::cast(*m.f1) : py::none();
  d["k_found"] = m.k_found;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dgcluster, m) {
  m.doc() = "Graph clustering by differentiable modularity maximization";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<Graph>(m, "Graph")
      .def_static("from_edges", &graph_from_edges, py::arg("num_nodes"), py::arg("edges"))
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly("degrees", [](const Graph& g) {
        return std::vector<std::int64_t>(g.degrees().begin(), g.degrees().end());
      })
      .def("edges", &edges_array)
      .def("has_edge", &Graph::has_edge)
      .def("check_invariants", &Graph::check_invariants);

  m.def("load_graph", &load_graph, py::arg("path"), py::arg("num_nodes") = py::none());
  m.def("load_features", &load_features, py::arg("path"), py::arg("num_nodes"));
  m.def("load_labels", [](const std::filesystem::path& p, std::size_t n) { return labels_array(load_labels(p, n)); },
        py::arg("path"), py::arg("num_nodes"));

  m.def("generate_sbm",
        [](const std::vector<std::size_t>& blocks, double p_in, double p_out, std::uint64_t seed) {
          SbmGraph s = generate_sbm(blocks, p_in, p_out, seed);
          return py::make_tuple(std::move(s.graph), partition_array(s.planted));
        },
        py::arg("block_sizes"), py::arg("p_in"), py::arg("p_out"), py::arg("seed"));
  m.def("normalized_adjacency", [](const Graph& g) {
    return Eigen::SparseMatrix<double>(normalized_adjacency(g));
  });

  py::class_<GcnModel>(m, "GcnModel")
      .def_readonly("layer_dims", &GcnModel::layer_dims)
      .def_property_readonly("weights", [](const GcnModel& model) { return model.weights; })
      .def("save", [](const GcnModel& model, const std::filesystem::path& p) { save_model(p, model); })
      .def_static("load", &load_model);
  m.def("init_model", [](const std::vector<std::size_t>& dims, std::uint64_t seed) { return init_model(dims, seed); },
        py::arg("layer_dims"), py::arg("seed"));
  m.def("selu", &selu);
  m.def("gcn_forward",
        [](const GcnModel& model, const Graph& g, const Matrix& features) {
          return gcn_forward(model, GcnInput(normalized_adjacency(g), features));
        },
        py::arg("model"), py::arg("graph"), py::arg("features"));
  m.def("transform_embeddings", [](const Matrix& raw) { return transform_embeddings(raw).values(); },
        py::arg("raw"));
  m.def("embed",
        [](const GcnModel& model, const Graph& g, const Matrix& features) {
          return embed(model, GcnInput(normalized_adjacency(g), features)).values();
        },
        py::arg("model"), py::arg("graph"), py::arg("features"));

  m.def("modularity_loss", [](const Matrix& x, const Graph& g) { return loss_tuple(modularity_loss(x, g)); },
        py::arg("x"), py::arg("graph"));
  m.def("aux_loss_labels",
        [](const Matrix& x, const std::vector<NodeId>& nodes, const std::vector<std::int32_t>& labels) {
          return loss_tuple(aux_loss_labels(x, LabelSupervision::from_labels(nodes, labels)));
        },
        py::arg("x"), py::arg("nodes"), py::arg("labels"));
  m.def("aux_loss_pairs",
        [](const Matrix& x, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
          return loss_tuple(aux_loss_pairs(x, PairSupervision{pairs}));
        },
        py::arg("x"), py::arg("pairs"));
  m.def("collapse_regularizer", [](const Matrix& x, double alpha) { return loss_tuple(collapse_regularizer(x, alpha)); },
        py::arg("x"), py::arg("alpha"));

  m.def("birch_fit",
        [](const Matrix& x, double threshold, std::size_t branching) {
          return partition_array(birch_fit(x, BirchParams{threshold, branching}));
        },
        py::arg("x"), py::arg("threshold") = 0.5, py::arg("branching_factor") = 50);

  m.def("modularity", [](const Graph& g, const IdArray& p) { return modularity(g, partition_from(p)); },
        py::arg("graph"), py::arg("partition"));
  m.def("conductance", [](const Graph& g, const IdArray& p) { return conductance(g, partition_from(p)); },
        py::arg("graph"), py::arg("partition"));
  m.def("nmi", [](const IdArray& p, const IdArray& labels) { return nmi(partition_from(p), labels_from(labels)); },
        py::arg("partition"), py::arg("labels"));
  m.def("pairwise_f1",
        [](const IdArray& p, const IdArray& labels, std::size_t sample_size, std::uint64_t seed) {
          return pairwise_f1(partition_from(p), labels_from(labels), sample_size, seed);
        },
        py::arg("partition"), py::arg("labels"), py::arg("sample_size") = kDefaultF1SampleSize,
        py::arg("seed") = 0);

  m.def("train",
        [](const std::string& config_json) {
          const RunConfig config = RunConfig::from_json_string(config_json);
          const RunSummary summary = run_experiment(config);
          py::dict out;
          out["mean"] = metrics_dict(summary.mean);
          out["std"] = metrics_dict(summary.stddev);
          out["failed"] = summary.failed;
          py::list partitions;
          for (const SeedResult& r : summary.results) {
            partitions.append(r.failure ? py::object(py::none()) : py::object(partition_array(r.partition)));
          }
          out["partitions"] = partitions;
          return out;
        },
        py::arg("config_json"), "Runs every seed of a JSON config (same keys as the CLI) and writes artifacts.");
}
