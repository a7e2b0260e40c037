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

#include "tam/metrics.hpp"

#include <algorithm>

#include "tam/topology.hpp"

namespace tam {

ConfusionMatrix ConfusionMatrix::from_predictions(std::span<const ClassId> preds,
                                                  std::span<const ClassId> labels,
                                                  std::span<const NodeId> nodes, int num_classes) {
  ConfusionMatrix cm(num_classes);
  for (NodeId v : nodes) {
    const ClassId y = labels[v];
    const ClassId p = preds[v];
    if (y < 0 || y >= num_classes || p < 0 || p >= num_classes) {
      throw ShapeError("confusion matrix: class id out of range at node " + std::to_string(v));
    }
    cm.add(y, p);
  }
  return cm;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::int64_t ConfusionMatrix::actual(ClassId k) const {
  std::int64_t s = 0;
  for (int j = 0; j < num_classes_; ++j) s += at(k, j);
  return s;
}

std::int64_t ConfusionMatrix::predicted(ClassId k) const {
  std::int64_t s = 0;
  for (int i = 0; i < num_classes_; ++i) s += at(i, k);
  return s;
}

double ConfusionMatrix::recall(ClassId k) const {
  const auto n = actual(k);
  return n > 0 ? static_cast<double>(at(k, k)) / static_cast<double>(n) : 0.0;
}

double ConfusionMatrix::precision(ClassId k) const {
  const auto n = predicted(k);
  return n > 0 ? static_cast<double>(at(k, k)) / static_cast<double>(n) : 0.0;
}

double ConfusionMatrix::f1(ClassId k) const {
  // 2TP / (2TP + FP + FN), which is 0 when TP is 0
  const auto tp = at(k, k);
  const auto denom = actual(k) + predicted(k);
  return denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
}

std::vector<ClassId> ConfusionMatrix::absent_classes() const {
  std::vector<ClassId> out;
  for (int k = 0; k < num_classes_; ++k) {
    if (actual(k) == 0) out.push_back(k);
  }
  return out;
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  double sum = 0.0;
  int present = 0;
  for (int k = 0; k < cm.num_classes(); ++k) {
    if (cm.actual(k) == 0) continue;
    sum += cm.recall(k);
    ++present;
  }
  return present > 0 ? sum / present : 0.0;
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.num_classes() == 0) return 0.0;
  double sum = 0.0;
  for (int k = 0; k < cm.num_classes(); ++k) sum += cm.f1(k);
  return sum / cm.num_classes();
}

double balanced_accuracy(std::span<const ClassId> preds, std::span<const ClassId> labels,
                         std::span<const NodeId> nodes, int num_classes) {
  return balanced_accuracy(ConfusionMatrix::from_predictions(preds, labels, nodes, num_classes));
}

double macro_f1(std::span<const ClassId> preds, std::span<const ClassId> labels,
                std::span<const NodeId> nodes, int num_classes) {
  return macro_f1(ConfusionMatrix::from_predictions(preds, labels, nodes, num_classes));
}

std::vector<ClassId> argmax_rows(const Tensor& logits) {
  std::vector<ClassId> out(logits.rows());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto r = logits.row(i);
    out[i] = static_cast<ClassId>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

std::string to_string(NldSource s) { return s == NldSource::kTruth ? "truth" : "estimated"; }

NldSource parse_nld_source(const std::string& name) {
  if (name == "truth") return NldSource::kTruth;
  if (name == "estimated") return NldSource::kEstimated;
  throw ConfigError("unknown NLD source '" + name + "' (expected truth or estimated)");
}

std::string to_string(NeighborCounting c) {
  return c == NeighborCounting::kUnion ? "union" : "multiset";
}

NeighborCounting parse_neighbor_counting(const std::string& name) {
  if (name == "union") return NeighborCounting::kUnion;
  if (name == "multiset") return NeighborCounting::kMultiset;
  throw ConfigError("unknown neighbor counting '" + name + "' (expected union or multiset)");
}

FpReport fp_topology_analysis(const Graph& graph, std::span<const ClassId> preds,
                              std::span<const NodeId> train, std::span<const NodeId> eval,
                              std::span<const ClassId> minor_classes, const Tensor& probs,
                              const FpOptions& options) {
  const std::size_t n = graph.num_nodes();
  const auto& labels = graph.labels();
  std::vector<std::uint8_t> is_minor(graph.num_classes(), 0);
  for (ClassId k : minor_classes) is_minor[k] = 1;
  auto minor = [&](ClassId k) { return k >= 0 && is_minor[k] != 0; };

  std::vector<std::uint8_t> known;
  if (options.source == NldSource::kTruth) {
    known.resize(n);
    for (std::size_t v = 0; v < n; ++v) known[v] = labels[v] != kUnlabeled;
  } else {
    if (probs.empty()) throw ShapeError("fp analysis: estimated NLD requires probabilities");
    known = make_mask(n, train);
  }
  const NldMatrix nld = neighbor_label_distribution(graph, train, known, labels, probs);
  const Tensor conn = connectivity_matrix(nld, labels, graph.num_classes());

  FpReport report;
  // major evaluation nodes
  std::vector<std::uint8_t> major_eval(n, 0);
  for (NodeId v : eval) {
    const ClassId y = labels[v];
    if (minor(y)) {
      ++report.fnr.denominator;
      if (preds[v] != y) ++report.fnr.numerator;
    } else {
      major_eval[v] = 1;
      ++report.minor_fp.denominator;
      if (minor(preds[v])) ++report.minor_fp.numerator;
    }
  }

  std::vector<std::uint8_t> counted(n, 0);
  for (NodeId v : anomalous_nodes(nld, conn, labels)) {
    if (!minor(labels[v])) continue;
    ++report.anomalous_minor;
    for (NodeId u : graph.neighbors(v)) {
      if (!major_eval[u]) continue;
      if (options.counting == NeighborCounting::kUnion) {
        if (counted[u]) continue;
        counted[u] = 1;
      }
      ++report.abnormal_minor_fp.denominator;
      if (minor(preds[u])) ++report.abnormal_minor_fp.numerator;
    }
  }
  return report;
}

}  // namespace tam
