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

std::vector<ClassId> default_minor_classes(int num_classes) {
  std::vector<ClassId> minors;
  const int count = num_classes / 2;
  for (int k = num_classes - count; k < num_classes; ++k) minors.push_back(k);
  return minors;
}

SplitMasks make_step_imbalance_split(const Graph& graph, std::span<const NodeId> base_train,
                                     std::span<const NodeId> val, std::span<const NodeId> test,
                                     double rho, std::span<const ClassId> minor_classes,
                                     std::uint64_t seed) {
  if (!(rho >= 1.0)) throw ConfigError("imbalance ratio must be >= 1");
  for (NodeId v : base_train) {
    if (graph.label(v) == kUnlabeled) {
      throw ConfigError("training node " + std::to_string(v) + " is unlabeled");
    }
  }
  const auto counts = class_counts(graph, base_train);
  const std::int64_t max_count = *std::max_element(counts.begin(), counts.end());
  const auto target = static_cast<std::int64_t>(std::floor(static_cast<double>(max_count) / rho));
  if (target < 1) throw ConfigError("imbalance ratio too large");

  Rng rng(seed);
  std::vector<std::uint8_t> drop(graph.num_nodes(), 0);
  for (ClassId k : minor_classes) {
    if (k < 0 || k >= graph.num_classes()) {
      throw ConfigError("minor class " + std::to_string(k) + " out of range");
    }
    if (counts[k] <= target) continue;
    std::vector<NodeId> members;
    for (NodeId v : base_train) {
      if (graph.label(v) == k) members.push_back(v);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = static_cast<std::size_t>(target); i < members.size(); ++i) drop[members[i]] = 1;
  }

  SplitMasks split;
  for (NodeId v : base_train) {
    if (!drop[v]) split.train.push_back(v);
  }
  split.val.assign(val.begin(), val.end());
  split.test.assign(test.begin(), test.end());
  return split;
}

SplitMasks stratified_split(const Graph& graph, double train_frac, double val_frac, Rng& rng) {
  std::vector<std::vector<NodeId>> by_class(graph.num_classes());
  for (std::size_t v = 0; v < graph.num_nodes(); ++v) {
    const ClassId y = graph.label(static_cast<NodeId>(v));
    if (y != kUnlabeled) by_class[y].push_back(static_cast<NodeId>(v));
  }
  SplitMasks split;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto n = static_cast<double>(members.size());
    const auto n_train = static_cast<std::size_t>(std::floor(train_frac * n));
    const auto n_val = static_cast<std::size_t>(std::floor(val_frac * n));
    for (std::size_t i = 0; i < members.size(); ++i) {
      auto& dest = i < n_train ? split.train : (i < n_train + n_val ? split.val : split.test);
      dest.push_back(members[i]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace tam
