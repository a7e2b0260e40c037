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

#include <cmath>
#include <numeric>
#include <string>

#include "tam/graph.hpp"

namespace tam {

Tensor SbmSpec::block_probs(std::size_t num_classes, double within, double between) {
  Tensor p(num_classes, num_classes, between);
  for (std::size_t k = 0; k < num_classes; ++k) p(k, k) = within;
  return p;
}

void SbmSpec::validate() const {
  const std::size_t k = class_sizes.size();
  if (k == 0) throw ConfigError("sbm: no classes");
  for (auto n : class_sizes) {
    if (n <= 0) throw ConfigError("sbm: class sizes must be positive");
  }
  if (edge_prob.rows() != k || edge_prob.cols() != k) {
    throw ConfigError("sbm: edge probability matrix must be " + std::to_string(k) + "x" +
                      std::to_string(k));
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double p = edge_prob(i, j);
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("sbm: edge probabilities must lie in [0,1]");
      if (p != edge_prob(j, i)) throw ConfigError("sbm: edge probability matrix must be symmetric");
    }
  }
  if (feature_dim < k) throw ConfigError("sbm: feature_dim must be >= number of classes");
  if (!(class_mean_separation >= 0.0)) throw ConfigError("sbm: class_mean_separation must be >= 0");
  if (!(feature_noise > 0.0)) throw ConfigError("sbm: feature_noise must be > 0");
}

std::pair<Graph, SplitMasks> generate_sbm(const SbmSpec& spec) {
  spec.validate();
  const std::size_t k = spec.class_sizes.size();
  const auto n = static_cast<std::size_t>(
      std::accumulate(spec.class_sizes.begin(), spec.class_sizes.end(), std::int64_t{0}));

  std::vector<ClassId> labels;
  labels.reserve(n);
  for (std::size_t c = 0; c < k; ++c) labels.insert(labels.end(), spec.class_sizes[c], static_cast<ClassId>(c));

  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double p = spec.edge_prob(labels[u], labels[v]);
      // always draw so the stream does not depend on which probabilities are zero
      if (unit(rng) < p) edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  }

  const double scale = spec.class_mean_separation / std::sqrt(2.0);
  std::normal_distribution<double> noise(0.0, spec.feature_noise);
  Tensor features(n, spec.feature_dim);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t d = 0; d < spec.feature_dim; ++d) features(v, d) = noise(rng);
    features(v, labels[v]) += scale;
  }

  Graph graph = Graph::from_edges(n, edges, std::move(features), std::move(labels),
                                  static_cast<int>(k));
  SplitMasks split = stratified_split(graph, 0.6, 0.2, rng);
  return {std::move(graph), std::move(split)};
}

}  // namespace tam
