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


// Slow dense reference implementations used to cross-check the library.
// They work from a dense adjacency matrix built straight from the edge list,
// never from the CSR structure under test.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "tam/graph.hpp"
#include "tam/metrics.hpp"
#include "tam/tensor.hpp"

namespace tam::testing {

struct Instance {
  Graph graph;
  std::vector<std::vector<int>> adj;  // dense 0/1, symmetric, zero diagonal
  std::vector<NodeId> train;
  std::vector<NodeId> eval;
};

// Random labeled graph, every class present in `train`. Edge list contains
// duplicates, reversed pairs and self-loops on purpose.
inline Instance random_instance(std::uint64_t seed, std::size_t max_nodes = 200,
                                int max_classes = 6, std::size_t min_nodes = 0) {
  Rng rng(seed);
  const int c = std::uniform_int_distribution<int>(2, max_classes)(rng);
  const std::size_t n =
      std::uniform_int_distribution<std::size_t>(
      std::max(min_nodes, static_cast<std::size_t>(3 * c)), max_nodes)(rng);
  const double p = std::uniform_real_distribution<double>(0.01, 0.15)(rng);

  std::vector<ClassId> labels(n);
  for (std::size_t v = 0; v < n; ++v) {
    labels[v] = v < static_cast<std::size_t>(c) ? static_cast<ClassId>(v)
                                                 : std::uniform_int_distribution<ClassId>(0, c - 1)(rng);
  }
  Instance inst;
  inst.adj.assign(n, std::vector<int>(n, 0));
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::bernoulli_distribution coin(p);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (!coin(rng)) continue;
      inst.adj[u][v] = inst.adj[v][u] = 1;
      edges.emplace_back(static_cast<NodeId>(v), static_cast<NodeId>(u));
      if (coin(rng)) edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    if (coin(rng)) edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(u));
  }
  Tensor features(n, 3);
  std::normal_distribution<double> gauss;
  for (auto& x : features.data()) x = gauss(rng);
  inst.graph = Graph::from_edges(n, edges, std::move(features), labels, c);

  // first c nodes cover every class
  std::bernoulli_distribution pick(0.3);
  for (std::size_t v = 0; v < n; ++v) {
    if (v < static_cast<std::size_t>(c) || pick(rng)) {
      inst.train.push_back(static_cast<NodeId>(v));
    } else {
      inst.eval.push_back(static_cast<NodeId>(v));
    }
  }
  return inst;
}

inline std::vector<std::vector<double>> dense_normalized_adjacency(
    const std::vector<std::vector<int>>& adj) {
  const std::size_t n = adj.size();
  std::vector<double> deg(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) deg[i] += adj[i][j];
  }
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = (i == j ? 1.0 : 0.0) + adj[i][j];
      out[i][j] = a / std::sqrt(deg[i] * deg[j]);
    }
  }
  return out;
}

// NLD row for v: closed neighborhood, truth one-hot where known, probs otherwise.
inline std::vector<double> brute_nld_row(const std::vector<std::vector<int>>& adj, NodeId v,
                                         const std::vector<bool>& known,
                                         const std::vector<ClassId>& labels, const Tensor& probs,
                                         int c) {
  std::vector<double> row(c, 0.0);
  double count = 0.0;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    if (u != static_cast<std::size_t>(v) && adj[v][u] == 0) continue;
    count += 1.0;
    if (known[u]) {
      row[labels[u]] += 1.0;
    } else {
      for (int k = 0; k < c; ++k) row[k] += probs(u, k);
    }
  }
  for (auto& x : row) x /= count;
  return row;
}

struct BruteTopology {
  std::vector<std::vector<double>> nld;  // one row per train node, same order
  std::vector<std::vector<double>> conn;
  std::vector<NodeId> anomalous;
};

inline BruteTopology brute_topology(const Instance& inst, const std::vector<bool>& known,
                                    const Tensor& probs) {
  const int c = inst.graph.num_classes();
  const auto& labels = inst.graph.labels();
  BruteTopology t;
  for (NodeId v : inst.train) t.nld.push_back(brute_nld_row(inst.adj, v, known, labels, probs, c));
  t.conn.assign(c, std::vector<double>(c, 0.0));
  std::vector<double> members(c, 0.0);
  for (std::size_t i = 0; i < inst.train.size(); ++i) {
    const ClassId y = labels[inst.train[i]];
    members[y] += 1.0;
    for (int k = 0; k < c; ++k) t.conn[y][k] += t.nld[i][k];
  }
  for (int y = 0; y < c; ++y) {
    for (int k = 0; k < c; ++k) t.conn[y][k] /= members[y];
  }
  for (std::size_t i = 0; i < inst.train.size(); ++i) {
    const ClassId y = labels[inst.train[i]];
    bool anomalous = false;
    for (int k = 0; k < c; ++k) {
      if (k != y && t.nld[i][k] / std::max(t.conn[y][k], 1e-12) > 1.0) anomalous = true;
    }
    if (anomalous) t.anomalous.push_back(inst.train[i]);
  }
  return t;
}

// FP ratios by explicit set construction.
inline FpReport brute_fp(const Instance& inst, const std::vector<ClassId>& preds,
                         const std::vector<NodeId>& anomalous, const std::set<ClassId>& minors,
                         NeighborCounting counting) {
  const auto& labels = inst.graph.labels();
  std::set<NodeId> major_eval;
  FpReport r;
  for (NodeId v : inst.eval) {
    if (minors.count(labels[v]) != 0) {
      ++r.fnr.denominator;
      r.fnr.numerator += preds[v] != labels[v];
    } else {
      major_eval.insert(v);
    }
  }
  for (NodeId v : major_eval) {
    ++r.minor_fp.denominator;
    r.minor_fp.numerator += minors.count(preds[v]) != 0;
  }
  std::multiset<NodeId> adjacent;
  for (NodeId v : anomalous) {
    if (minors.count(labels[v]) == 0) continue;
    ++r.anomalous_minor;
    for (NodeId u : major_eval) {
      if (inst.adj[v][u] != 0) adjacent.insert(u);
    }
  }
  if (counting == NeighborCounting::kUnion) {
    const std::set<NodeId> unique(adjacent.begin(), adjacent.end());
    adjacent = std::multiset<NodeId>(unique.begin(), unique.end());
  }
  for (NodeId u : adjacent) {
    ++r.abnormal_minor_fp.denominator;
    r.abnormal_minor_fp.numerator += minors.count(preds[u]) != 0;
  }
  return r;
}

}  // namespace tam::testing
