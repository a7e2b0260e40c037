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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tam/core.hpp"
#include "tam/graph.hpp"
#include "tam/tensor.hpp"

namespace tam {

/// Lower bound on connectivity-matrix denominators in D / C ratios.
inline constexpr double kRatioEps = 1e-12;

inline double ratio_denominator(double c) { return c > kRatioEps ? c : kRatioEps; }
/// Lower bound on the class-temperature denominator.
inline constexpr double kTemperatureFloor = 1e-6;

/// Class-wise temperature:
///   pi_k = delta * N_k / mean(N) + (1 - delta)
///   T_k  = 1 / (phi * max(pi_k + 1 - max_j pi_j, 1e-6))
std::vector<double> class_temperatures(std::span<const std::int64_t> counts, double phi,
                                       double delta);

/// Row-wise softmax(logits_v / T).
Tensor pseudo_label_probs(const Tensor& logits, std::span<const double> temperatures);

/// Neighbor label distribution rows for a subset of nodes.
struct NldMatrix {
  std::vector<NodeId> nodes;  // row i describes nodes[i]
  Tensor rows;                // nodes.size() x num_classes
};

/// Label evidence for the closed neighborhood of each node in `nodes`: for
/// every u in N(v) + {v}, one-hot(labels[u]) when `known[u]`, otherwise the
/// probability row probs[u]; the sum is divided by d_v + 1. `probs` may be
/// empty only if every visited node is known.
NldMatrix neighbor_label_distribution(const Graph& graph, std::span<const NodeId> nodes,
                                      std::span<const std::uint8_t> known,
                                      std::span<const ClassId> labels, const Tensor& probs);

/// Class-wise connectivity matrix: row k is the mean of the NLD rows whose
/// node has label k. Throws ConfigError if some class has no row.
Tensor connectivity_matrix(const NldMatrix& nld, std::span<const ClassId> labels, int num_classes);

/// Nodes whose largest off-class ratio D[v,t] / C[y_v,t] exceeds 1.
std::vector<NodeId> anomalous_nodes(const NldMatrix& nld, const Tensor& conn,
                                    std::span<const ClassId> labels);

/// Mask with 1 at every listed node.
std::vector<std::uint8_t> make_mask(std::size_t num_nodes, std::span<const NodeId> nodes);

}  // namespace tam
