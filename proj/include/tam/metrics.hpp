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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tam/core.hpp"
#include "tam/graph.hpp"
#include "tam/tensor.hpp"

namespace tam {

/// Entry (i, j) counts nodes of true class i predicted as j.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes)
      : num_classes_(num_classes), counts_(static_cast<std::size_t>(num_classes) * num_classes, 0) {}

  static ConfusionMatrix from_predictions(std::span<const ClassId> preds,
                                          std::span<const ClassId> labels,
                                          std::span<const NodeId> nodes, int num_classes);

  void add(ClassId truth, ClassId pred) { ++counts_[truth * num_classes_ + pred]; }
  std::int64_t at(ClassId truth, ClassId pred) const { return counts_[truth * num_classes_ + pred]; }
  int num_classes() const noexcept { return num_classes_; }
  std::int64_t total() const;
  std::int64_t actual(ClassId k) const;
  std::int64_t predicted(ClassId k) const;

  double recall(ClassId k) const;
  double precision(ClassId k) const;
  double f1(ClassId k) const;

  /// Classes with no node in the evaluated set.
  std::vector<ClassId> absent_classes() const;

 private:
  int num_classes_;
  std::vector<std::int64_t> counts_;
};

/// Mean per-class recall over classes present in the matrix.
double balanced_accuracy(const ConfusionMatrix& cm);
/// Unweighted mean of per-class F1 over all classes (empty classes give 0).
double macro_f1(const ConfusionMatrix& cm);

double balanced_accuracy(std::span<const ClassId> preds, std::span<const ClassId> labels,
                         std::span<const NodeId> nodes, int num_classes);
double macro_f1(std::span<const ClassId> preds, std::span<const ClassId> labels,
                std::span<const NodeId> nodes, int num_classes);

/// Row-wise argmax (lowest index wins ties).
std::vector<ClassId> argmax_rows(const Tensor& logits);

// ---- false-positive topology analysis -------------------------------------

/// Where the NLD used to find anomalous minor nodes comes from: ground truth
/// for every node, or training labels plus model pseudo-labels.
enum class NldSource { kTruth, kEstimated };
/// How major nodes adjacent to several anomalous minor nodes are counted.
enum class NeighborCounting { kUnion, kMultiset };

std::string to_string(NldSource s);
NldSource parse_nld_source(const std::string& name);
std::string to_string(NeighborCounting c);
NeighborCounting parse_neighbor_counting(const std::string& name);

struct Ratio {
  std::int64_t numerator = 0;
  std::int64_t denominator = 0;

  /// nullopt when the denominator is zero.
  std::optional<double> value() const {
    if (denominator <= 0) return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct FpReport {
  /// Minor-class false positives among major evaluation nodes adjacent to
  /// anomalously connected minor training nodes.
  Ratio abnormal_minor_fp;
  /// Minor-class false positives among all major evaluation nodes.
  Ratio minor_fp;
  /// Minor evaluation nodes not predicted as their own class.
  Ratio fnr;
  std::int64_t anomalous_minor = 0;

  friend bool operator==(const FpReport&, const FpReport&) = default;
};

struct FpOptions {
  NldSource source = NldSource::kTruth;
  NeighborCounting counting = NeighborCounting::kUnion;
};

/// `train` are the labeled nodes V^L, `eval` the evaluation nodes the major
/// set is drawn from. `probs` (num_nodes x C pseudo-label probabilities) is
/// required for the estimated source, and for the truth source only if some
/// visited node has no label.
FpReport fp_topology_analysis(const Graph& graph, std::span<const ClassId> preds,
                              std::span<const NodeId> train, std::span<const NodeId> eval,
                              std::span<const ClassId> minor_classes, const Tensor& probs,
                              const FpOptions& options = {});

}  // namespace tam
