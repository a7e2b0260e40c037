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

#include "doctest.h"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "tam/topology.hpp"

using namespace tam;

namespace {

NldMatrix nld_of(std::vector<NodeId> nodes, const Tensor& rows) { return NldMatrix{std::move(nodes), rows}; }

}  // namespace

TEST_CASE("class temperatures") {
  const std::vector<std::int64_t> skewed{10, 10, 1};
  const auto t = class_temperatures(skewed, 1.0, 0.4);
  CHECK(t[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(t[2] - 1.0 / (1.0 - 0.4 * 9.0 / 7.0)) <= 1e-12);
  CHECK(std::abs(t[2] - 2.0588235294) <= 1e-6);

  const std::vector<std::int64_t> balanced{7, 7, 7, 7};
  for (double phi : {0.8, 1.0, 1.2}) {
    for (double x : class_temperatures(balanced, phi, 0.4)) CHECK(x == 1.0 / phi);
  }
  const auto t08 = class_temperatures(skewed, 0.8, 0.4);
  for (int k = 0; k < 3; ++k) CHECK(t08[k] == doctest::Approx(t[k] / 0.8).epsilon(1e-14));
}

TEST_CASE("temperature decreases with class size and stays finite") {
  std::vector<std::int64_t> counts{50, 20, 5};
  double prev = class_temperatures(counts, 1.0, 0.4)[2];
  for (std::int64_t n = 6; n <= 50; ++n) {
    counts[2] = n;
    const double cur = class_temperatures(counts, 1.0, 0.4)[2];
    CHECK(cur < prev);
    prev = cur;
  }
  // extreme imbalance drives the raw denominator negative; the floor holds
  const std::vector<std::int64_t> extreme{100000, 1};
  const auto t = class_temperatures(extreme, 1.0, 1.0);
  CHECK(std::isfinite(t[1]));
  CHECK(t[1] == 1.0 / kTemperatureFloor);
}

TEST_CASE("pseudo-label probabilities") {
  const std::vector<double> t{1.0, 2.0};
  const Tensor p = pseudo_label_probs(Tensor::from_rows({{2, 0}, {3, 3}}), t);
  CHECK(p(0, 0) == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(p(0, 1) == doctest::Approx(0.1192).epsilon(1e-3));
  CHECK(p(0, 0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
  // equal logits stay uniform whatever the temperatures
  const Tensor u = pseudo_label_probs(Tensor::from_rows({{0, 0, 0}}), std::vector<double>{1, 2, 3});
  for (double x : u.data()) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  Rng rng(4);
  const Tensor logits = testing::random_tensor(20, 5, rng, 3.0);
  const Tensor q = pseudo_label_probs(logits, std::vector<double>(5, 1.7));
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(std::accumulate(q.row(i).begin(), q.row(i).end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    const auto a = std::max_element(q.row(i).begin(), q.row(i).end()) - q.row(i).begin();
    const auto b = std::max_element(logits.row(i).begin(), logits.row(i).end()) - logits.row(i).begin();
    CHECK(a == b);
  }
}

TEST_CASE("NLD fixtures") {
  // 0 - 1, 0 - 2; node 3 isolated
  const std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {0, 2}};
  const std::vector<ClassId> labels{0, 0, 1, 2};
  const Graph g = Graph::from_edges(4, edges, Tensor(4, 1), labels, 3);
  const std::vector<std::uint8_t> all{1, 1, 1, 1};

  const std::vector<NodeId> isolated{3};
  CHECK(neighbor_label_distribution(g, isolated, all, labels, Tensor{}).rows ==
        Tensor::from_rows({{0, 0, 1}}));

  const std::vector<NodeId> hub{0};
  const Tensor r = neighbor_label_distribution(g, hub, all, labels, Tensor{}).rows;
  CHECK(r(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // node 2 unlabeled with pseudo-labels (0.7, 0.3, 0)
  const std::vector<std::uint8_t> partial{1, 1, 0, 1};
  Tensor probs(4, 3);
  probs(2, 0) = 0.7;
  probs(2, 1) = 0.3;
  const Tensor e = neighbor_label_distribution(g, hub, partial, labels, probs).rows;
  CHECK(e(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(e(0, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(e(0, 2) == 0.0);
}

TEST_CASE("connectivity matrix fixtures") {
  const std::vector<ClassId> labels{0, 0, 1};
  const NldMatrix nld = nld_of({0, 1, 2}, Tensor::from_rows({{1, 0}, {0, 1}, {0.25, 0.75}}));
  const Tensor c = connectivity_matrix(nld, labels, 2);
  CHECK(c == Tensor::from_rows({{0.5, 0.5}, {0.25, 0.75}}));

  const NldMatrix missing = nld_of({0, 1}, Tensor::from_rows({{1, 0}, {0, 1}}));
  try {
    connectivity_matrix(missing, labels, 2);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("has no labeled nodes") != std::string::npos);
  }
}

TEST_CASE("anomalous node fixtures") {
  const std::vector<ClassId> labels{0, 0, 1};
  const Tensor conn = Tensor::from_rows({{0.8, 0.1, 0.1}, {0.2, 0.7, 0.1}, {0, 0, 1}});
  // node 0 equals its class mean; node 1 has D/C = 3 towards class 1
  const NldMatrix nld = nld_of({0, 1, 2}, Tensor::from_rows({{0.8, 0.1, 0.1}, {0.6, 0.3, 0.1}, {0.2, 0.7, 0.1}}));
  CHECK(anomalous_nodes(nld, conn, labels) == std::vector<NodeId>{1});

  const NldMatrix typical = nld_of({0, 2}, Tensor::from_rows({{0.8, 0.1, 0.1}, {0.2, 0.7, 0.1}}));
  CHECK(anomalous_nodes(typical, conn, labels).empty());
}

TEST_CASE("topology matches brute force on random graphs") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CAPTURE(seed);
    const auto inst = testing::random_instance(seed);
    const Graph& g = inst.graph;
    const std::size_t n = g.num_nodes();
    const int c = g.num_classes();
    Rng rng(seed);
    const Tensor probs = pseudo_label_probs(testing::random_tensor(n, c, rng), std::vector<double>(c, 1.0));
    const auto known_mask = make_mask(n, inst.train);
    std::vector<bool> known(n);
    for (std::size_t v = 0; v < n; ++v) known[v] = known_mask[v] != 0;

    const NldMatrix nld = neighbor_label_distribution(g, inst.train, known_mask, g.labels(), probs);
    const Tensor conn = connectivity_matrix(nld, g.labels(), c);
    const auto ref = testing::brute_topology(inst, known, probs);

    CHECK(nld.nodes == inst.train);
    double worst = 0.0;
    for (std::size_t i = 0; i < inst.train.size(); ++i) {
      double sum = 0.0;
      for (int k = 0; k < c; ++k) {
        worst = std::max(worst, std::abs(nld.rows(i, k) - ref.nld[i][k]));
        sum += nld.rows(i, k);
        CHECK(nld.rows(i, k) >= 0.0);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      const NodeId v = inst.train[i];
      CHECK(nld.rows(i, g.label(v)) >= 1.0 / (g.degree(v) + 1.0) - 1e-15);
    }
    for (int y = 0; y < c; ++y) {
      for (int k = 0; k < c; ++k) worst = std::max(worst, std::abs(conn(y, k) - ref.conn[y][k]));
    }
    CHECK(worst <= 1e-12);
    CHECK(anomalous_nodes(nld, conn, g.labels()) == ref.anomalous);
  }
}

TEST_CASE("fully labeled neighborhoods ignore the logits") {
  const auto inst = testing::random_instance(5);
  const Graph& g = inst.graph;
  const std::vector<std::uint8_t> all(g.num_nodes(), 1);
  Rng rng(1);
  const Tensor p1 = pseudo_label_probs(testing::random_tensor(g.num_nodes(), g.num_classes(), rng),
                                       std::vector<double>(g.num_classes(), 1.0));
  const Tensor p2 = pseudo_label_probs(testing::random_tensor(g.num_nodes(), g.num_classes(), rng),
                                       std::vector<double>(g.num_classes(), 1.0));
  CHECK(neighbor_label_distribution(g, inst.train, all, g.labels(), p1).rows ==
        neighbor_label_distribution(g, inst.train, all, g.labels(), p2).rows);
}
