// Copyright 2026 The tamgraph Authors.
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

#include <algorithm>
#include <cmath>
#include <string>

#include "tam/graph.hpp"

namespace tam {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges,
                        Tensor features, std::vector<ClassId> labels, int num_classes,
                        std::size_t* dropped_self_loops) {
  if (features.rows() != num_nodes) {
    throw ShapeError("feature matrix has " + std::to_string(features.rows()) + " rows for " +
                     std::to_string(num_nodes) + " nodes");
  }
  if (labels.size() != num_nodes) {
    throw ShapeError("label array has " + std::to_string(labels.size()) + " entries for " +
                     std::to_string(num_nodes) + " nodes");
  }
  for (ClassId y : labels) {
    if (y != kUnlabeled && (y < 0 || y >= num_classes)) {
      throw ShapeError("label " + std::to_string(y) + " outside 0.." +
                       std::to_string(num_classes - 1));
    }
  }

  std::vector<std::pair<NodeId, NodeId>> directed;
  directed.reserve(edges.size() * 2);
  std::size_t self_loops = 0;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= num_nodes ||
        static_cast<std::size_t>(v) >= num_nodes) {
      throw ShapeError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                       ") references a node outside 0.." + std::to_string(num_nodes - 1));
    }
    if (u == v) {
      ++self_loops;
      continue;
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.num_nodes_ = num_nodes;
  g.num_classes_ = num_classes;
  g.offsets_.assign(num_nodes + 1, 0);
  g.targets_.reserve(directed.size());
  for (auto [u, v] : directed) {
    ++g.offsets_[u + 1];
    g.targets_.push_back(v);
  }
  for (std::size_t i = 0; i < num_nodes; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  if (dropped_self_loops != nullptr) *dropped_self_loops = self_loops;
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::int64_t> class_counts(const Graph& graph, std::span<const NodeId> nodes) {
  std::vector<std::int64_t> counts(graph.num_classes(), 0);
  for (NodeId v : nodes) {
    const ClassId y = graph.label(v);
    if (y >= 0 && y < graph.num_classes()) ++counts[y];
  }
  return counts;
}

void validate_split(const Graph& graph, const SplitMasks& split) {
  std::vector<std::uint8_t> seen(graph.num_nodes(), 0);
  auto check = [&](const std::vector<NodeId>& nodes, const char* name) {
    for (NodeId v : nodes) {
      if (v < 0 || static_cast<std::size_t>(v) >= graph.num_nodes()) {
        throw ConfigError(std::string(name) + " split references node " + std::to_string(v) +
                          " outside the graph");
      }
      if (graph.label(v) == kUnlabeled) {
        throw ConfigError(std::string(name) + " split contains unlabeled node " +
                          std::to_string(v));
      }
      if (seen[v]++) {
        throw ConfigError("node " + std::to_string(v) + " appears twice across splits");
      }
    }
  };
  check(split.train, "train");
  check(split.val, "val");
  check(split.test, "test");
}

SparseMatrix normalized_adjacency(const Graph& graph) {
  const std::size_t n = graph.num_nodes();
  SparseMatrix a;
  a.rows = n;
  a.cols = n;
  a.offsets.reserve(n + 1);
  a.offsets.push_back(0);
  a.indices.reserve(graph.targets().size() + n);
  a.values.reserve(graph.targets().size() + n);

  auto dhat = [&](NodeId v) { return static_cast<double>(graph.degree(v) + 1); };
  for (std::size_t v = 0; v < n; ++v) {
    const auto vid = static_cast<NodeId>(v);
    bool self_done = false;
    // neighbors are sorted; splice the diagonal entry in order
    for (NodeId u : graph.neighbors(vid)) {
      if (!self_done && u > vid) {
        a.indices.push_back(vid);
        a.values.push_back(1.0 / dhat(vid));
        self_done = true;
      }
      a.indices.push_back(u);
      a.values.push_back(1.0 / std::sqrt(dhat(vid) * dhat(u)));
    }
    if (!self_done) {
      a.indices.push_back(vid);
      a.values.push_back(1.0 / dhat(vid));
    }
    a.offsets.push_back(a.indices.size());
  }
  return a;
}

SparseMatrix mean_aggregation(const Graph& graph) {
  const std::size_t n = graph.num_nodes();
  SparseMatrix a;
  a.rows = n;
  a.cols = n;
  a.offsets = graph.offsets();
  a.indices = graph.targets();
  a.values.resize(a.indices.size());
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t d = a.offsets[v + 1] - a.offsets[v];
    for (std::size_t k = a.offsets[v]; k < a.offsets[v + 1]; ++k) {
      a.values[k] = 1.0 / static_cast<double>(d);
    }
  }
  return a;
}

}  // namespace tam
