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
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "tam/core.hpp"
#include "tam/tensor.hpp"

namespace tam {

/// Undirected, unweighted attributed graph in CSR form.
///
/// Both directions of every edge are stored, there are no duplicates and no
/// self-loops. Self-contribution is added analytically by consumers
/// (normalized adjacency, neighbor label distribution).
class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list; edges are symmetrized and deduplicated and
  /// self-loops are dropped. `dropped_self_loops`, when given, receives the count.
  static Graph from_edges(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges,
                          Tensor features, std::vector<ClassId> labels, int num_classes,
                          std::size_t* dropped_self_loops = nullptr);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  /// Undirected edge count.
  std::size_t num_edges() const noexcept { return targets_.size() / 2; }
  int num_classes() const noexcept { return num_classes_; }

  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], degree(v)};
  }
  bool has_edge(NodeId u, NodeId v) const;

  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const std::vector<NodeId>& targets() const noexcept { return targets_; }
  const Tensor& features() const noexcept { return features_; }
  const std::vector<ClassId>& labels() const noexcept { return labels_; }
  ClassId label(NodeId v) const { return labels_[v]; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t num_nodes_ = 0;
  int num_classes_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  Tensor features_;
  std::vector<ClassId> labels_;
};

struct SplitMasks {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;

  friend bool operator==(const SplitMasks&, const SplitMasks&) = default;
};

/// Per-class counts of `nodes` (labels outside 0..num_classes-1 are ignored).
std::vector<std::int64_t> class_counts(const Graph& graph, std::span<const NodeId> nodes);

/// Throws ConfigError if the masks overlap, reference unlabeled or
/// out-of-range nodes.
void validate_split(const Graph& graph, const SplitMasks& split);

// ---- file formats ---------------------------------------------------------

/// Edge file: `u<TAB>v` per line, `#` comments. Features: CSV, row i = node i.
/// Labels: `node_id<TAB>class_id` per node; class -1 means unlabeled.
Graph load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& feature_path,
                 const std::filesystem::path& label_path,
                 std::size_t* dropped_self_loops = nullptr);
void save_graph(const Graph& graph, const std::filesystem::path& edge_path,
                const std::filesystem::path& feature_path,
                const std::filesystem::path& label_path);

/// JSON object with integer arrays `train`, `val`, `test`.
SplitMasks load_split(const std::filesystem::path& path);
void save_split(const SplitMasks& split, const std::filesystem::path& path);

// ---- split construction ---------------------------------------------------

/// The last floor(num_classes / 2) class ids.
std::vector<ClassId> default_minor_classes(int num_classes);

/// Step imbalance: every minor class keeps floor(max_k N_k / rho) randomly
/// chosen training nodes; removed nodes are simply dropped from `train`.
/// Classes already at or below the target are left untouched.
SplitMasks make_step_imbalance_split(const Graph& graph, std::span<const NodeId> base_train,
                                     std::span<const NodeId> val, std::span<const NodeId> test,
                                     double rho, std::span<const ClassId> minor_classes,
                                     std::uint64_t seed);

/// Stratified random split per class, sizes floor(frac * N_k) for train and
/// val, remainder test.
SplitMasks stratified_split(const Graph& graph, double train_frac, double val_frac, Rng& rng);

// ---- synthetic graphs -----------------------------------------------------

struct SbmSpec {
  std::vector<std::int64_t> class_sizes;
  Tensor edge_prob;  // k x k, symmetric
  std::size_t feature_dim = 16;
  double class_mean_separation = 1.0;
  double feature_noise = 1.0;
  std::uint64_t seed = 0;

  /// Two-level block matrix: `within` on the diagonal, `between` elsewhere.
  static Tensor block_probs(std::size_t num_classes, double within, double between);
  void validate() const;
};

/// Nodes are laid out class by class. Class means are scaled one-hot vectors
/// (pairwise distance exactly `class_mean_separation`); requires
/// feature_dim >= number of classes. Default split is 60/20/20 stratified.
std::pair<Graph, SplitMasks> generate_sbm(const SbmSpec& spec);

// ---- propagation matrices -------------------------------------------------

/// GCN propagation matrix D^-1/2 (A + I) D^-1/2.
SparseMatrix normalized_adjacency(const Graph& graph);
/// Row-normalized adjacency without self-loops (neighbor mean); isolated
/// nodes get an empty row.
SparseMatrix mean_aggregation(const Graph& graph);

}  // namespace tam
