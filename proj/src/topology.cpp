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

#include "tam/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tam/tape.hpp"

namespace tam {

std::vector<double> class_temperatures(std::span<const std::int64_t> counts, double phi,
                                       double delta) {
  if (counts.empty()) return {};
  const double mean =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0})) /
      static_cast<double>(counts.size());
  std::vector<double> pi(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    pi[k] = delta * static_cast<double>(counts[k]) / mean + (1.0 - delta);
  }
  const double pi_max = *std::max_element(pi.begin(), pi.end());
  std::vector<double> temps(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    temps[k] = 1.0 / (phi * std::max(pi[k] + 1.0 - pi_max, kTemperatureFloor));
  }
  return temps;
}

Tensor pseudo_label_probs(const Tensor& logits, std::span<const double> temperatures) {
  if (temperatures.size() != logits.cols()) {
    throw ShapeError("pseudo_label_probs: one temperature per class required");
  }
  Tensor scaled = logits;
  for (std::size_t i = 0; i < scaled.rows(); ++i) {
    auto r = scaled.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] /= temperatures[k];
  }
  return softmax_rows(scaled);
}

NldMatrix neighbor_label_distribution(const Graph& graph, std::span<const NodeId> nodes,
                                      std::span<const std::uint8_t> known,
                                      std::span<const ClassId> labels, const Tensor& probs) {
  const auto c = static_cast<std::size_t>(graph.num_classes());
  if (known.size() != graph.num_nodes() || labels.size() != graph.num_nodes()) {
    throw ShapeError("neighbor_label_distribution: mask/labels must cover every node");
  }
  if (!probs.empty() && (probs.rows() != graph.num_nodes() || probs.cols() != c)) {
    throw ShapeError("neighbor_label_distribution: probs must be num_nodes x num_classes");
  }
  NldMatrix nld;
  nld.nodes.assign(nodes.begin(), nodes.end());
  nld.rows = Tensor(nodes.size(), c);

  auto add = [&](std::span<double> row, NodeId u) {
    if (known[u]) {
      row[labels[u]] += 1.0;
    } else {
      if (probs.empty()) {
        throw ShapeError("neighbor_label_distribution: node " + std::to_string(u) +
                         " is unknown but no probabilities were given");
      }
      const auto p = probs.row(u);
      for (std::size_t k = 0; k < c; ++k) row[k] += p[k];
    }
  };

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    auto row = nld.rows.row(i);
    add(row, v);
    for (NodeId u : graph.neighbors(v)) add(row, u);
    const double inv = 1.0 / static_cast<double>(graph.degree(v) + 1);
    for (auto& x : row) x *= inv;
  }
  return nld;
}

Tensor connectivity_matrix(const NldMatrix& nld, std::span<const ClassId> labels, int num_classes) {
  const auto c = static_cast<std::size_t>(num_classes);
  Tensor conn(c, c);
  std::vector<std::int64_t> counts(c, 0);
  for (std::size_t i = 0; i < nld.nodes.size(); ++i) {
    const ClassId y = labels[nld.nodes[i]];
    ++counts[y];
    auto dst = conn.row(y);
    auto src = nld.rows.row(i);
    for (std::size_t k = 0; k < c; ++k) dst[k] += src[k];
  }
  for (std::size_t k = 0; k < c; ++k) {
    if (counts[k] == 0) {
      throw ConfigError("class " + std::to_string(k) + " has no labeled nodes");
    }
    for (auto& x : conn.row(k)) x /= static_cast<double>(counts[k]);
  }
  return conn;
}

std::vector<NodeId> anomalous_nodes(const NldMatrix& nld, const Tensor& conn,
                                    std::span<const ClassId> labels) {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < nld.nodes.size(); ++i) {
    const NodeId v = nld.nodes[i];
    const ClassId y = labels[v];
    const auto row = nld.rows.row(i);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (static_cast<ClassId>(t) == y) continue;
      if (row[t] / ratio_denominator(conn(y, t)) > 1.0) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> make_mask(std::size_t num_nodes, std::span<const NodeId> nodes) {
  std::vector<std::uint8_t> mask(num_nodes, 0);
  for (NodeId v : nodes) mask[v] = 1;
  return mask;
}

}  // namespace tam
