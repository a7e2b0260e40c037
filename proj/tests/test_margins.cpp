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
#include "tam/margins.hpp"
#include "tam/tape.hpp"

using namespace tam;

namespace {

using Vec = std::vector<double>;

// JS((1/2, 1/2), (1, 0)) = (3/4) ln(4/3), evaluated to 40 digits with mpmath.
constexpr double kJsHalfVsPoint = 0.2157615543388356955794142544953705736276;

Vec random_distribution(std::size_t n, Rng& rng, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec p(n);
  for (auto& x : p) x = u(rng) < zero_prob ? 0.0 : u(rng);
  if (std::accumulate(p.begin(), p.end(), 0.0) == 0.0) p[0] = 1.0;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace

TEST_CASE("JS divergence fixtures") {
  CHECK(js_divergence(Vec{1, 0}, Vec{0, 1}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(std::abs(js_divergence(Vec{0.5, 0.5}, Vec{1, 0}) - kJsHalfVsPoint) <= 1e-15);
  CHECK(js_divergence(Vec{0.2, 0.3, 0.5}, Vec{0.2, 0.3, 0.5}) == 0.0);
}

TEST_CASE("JS divergence properties") {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const Vec p = random_distribution(n, rng, 0.3);
    const Vec q = random_distribution(n, rng, 0.3);
    const double pq = js_divergence(p, q);
    CHECK(pq == js_divergence(q, p));
    CHECK(pq >= 0.0);
    CHECK(pq <= std::log(2.0) + 1e-12);
    CHECK(js_divergence(p, p) <= 1e-15);
    const bool equal = p == q;
    if (!equal) CHECK(pq > 0.0);
  }
  CHECK_THROWS_AS(js_divergence(Vec{1, 0}, Vec{1, 0, 0}), ShapeError);
}

TEST_CASE("ACM fixtures") {
  const Tensor conn = Tensor::from_rows({{0.8, 0.1, 0.1}, {0.2, 0.7, 0.1}, {0.1, 0.1, 0.8}});
  for (ClassId y = 0; y < 3; ++y) {
    for (double m : acm_margins(conn.row(y), conn, y)) CHECK(m == 0.0);
  }
  const auto m = acm_margins(Vec{0.4, 0.3, 0.3}, conn, 0);
  CHECK(std::abs(m[1] - (-std::log(6.0))) <= 1e-12);
  CHECK(std::abs(m[2] - (-std::log(6.0))) <= 1e-12);
  CHECK(m[0] == 0.0);
  // product ratio below one is clipped
  const auto clipped = acm_margins(Vec{0.95, 0.04, 0.01}, conn, 0);
  CHECK(clipped == Vec{0, 0, 0});
  // zero connectivity stays finite
  const Tensor sparse = Tensor::from_rows({{1, 0}, {0, 1}});
  const auto guarded = acm_margins(Vec{0.5, 0.5}, sparse, 0);
  CHECK(std::isfinite(guarded[1]));
  CHECK(guarded[1] < 0.0);
}

TEST_CASE("ACM is nonpositive with a zero self entry") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor conn(4, 4);
    for (std::size_t k = 0; k < 4; ++k) {
      const Vec r = random_distribution(4, rng);
      std::copy(r.begin(), r.end(), conn.row(k).begin());
    }
    Vec row = random_distribution(4, rng, 0.3);
    const ClassId y = trial % 4;
    if (row[y] == 0.0) row[y] = 0.25;
    const auto m = acm_margins(row, conn, y);
    for (std::size_t t = 0; t < 4; ++t) CHECK(m[t] <= 0.0);
    CHECK(m[y] == 0.0);
  }
}

TEST_CASE("law of cosines") {
  CHECK(*cos_from_sides(3, 4, 5) == doctest::Approx(0.0));
  CHECK(*cos_from_sides(3, 5, 4) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(*cos_from_sides(2, 2, 0) == 1.0);
  CHECK(*cos_from_sides(3, 4, 0.5) == 1.0);
  CHECK(*cos_from_sides(0.5, 0.5, 1.5) == -1.0);
  CHECK_FALSE(cos_from_sides(0, 1, 1).has_value());
  CHECK_FALSE(cos_from_sides(1, 0, 1).has_value());

  const Tensor conn = Tensor::from_rows({{0.8, 0.1, 0.1}, {0.2, 0.7, 0.1}, {0.1, 0.1, 0.8}});
  const Vec d{0.5, 0.4, 0.1};
  const double a = js_divergence(d, conn.row(0));
  const double b = js_divergence(conn.row(1), conn.row(0));
  const double c = js_divergence(d, conn.row(1));
  // divergences need not satisfy the triangle inequality
  const double raw = (a * a + b * b - c * c) / (2 * a * b);
  CHECK(raw > 1.0);
  CHECK(*cos_angle(d, conn, 0, 1) == 1.0);
  const Vec e{0.1, 0.1, 0.8};
  const double a2 = js_divergence(e, conn.row(0));
  const double c2 = js_divergence(e, conn.row(1));
  const double raw2 = (a2 * a2 + b * b - c2 * c2) / (2 * a2 * b);
  CHECK(raw2 == doctest::Approx(0.446074052212573).epsilon(1e-12));
  CHECK(*cos_angle(e, conn, 0, 1) == doctest::Approx(raw2).epsilon(1e-14));
}

TEST_CASE("ADM fixtures") {
  const Tensor conn = Tensor::from_rows({{0.8, 0.1, 0.1}, {0.2, 0.7, 0.1}, {0.1, 0.1, 0.8}});
  // node sits on its own class mean
  for (double m : adm_margins(conn.row(0), conn, 0)) CHECK(m == 0.0);
  // node sits on class 1's mean
  const auto on_target = adm_margins(conn.row(1), conn, 0);
  CHECK(std::abs(on_target[1] - (-1.0)) <= 1e-9);
  CHECK(on_target[0] == 0.0);

  // opposite side of the self class from the target: the margin grows
  const Tensor line = Tensor::from_rows({{0.5, 0.5}, {0.9, 0.1}});
  const auto away = adm_margins(Vec{0.1, 0.9}, line, 0);
  CHECK(*cos_angle(Vec{0.1, 0.9}, line, 0, 1) < 0.0);
  CHECK(away[1] > 0.0);

  // identical class rows are degenerate
  const Tensor twins = Tensor::from_rows({{0.6, 0.4}, {0.6, 0.4}});
  CHECK(adm_margins(Vec{0.9, 0.1}, twins, 0) == Vec{0, 0});
}

TEST_CASE("ADM magnitude bound") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor conn(3, 3);
    for (std::size_t k = 0; k < 3; ++k) {
      const Vec r = random_distribution(3, rng);
      std::copy(r.begin(), r.end(), conn.row(k).begin());
    }
    const Vec row = random_distribution(3, rng, 0.2);
    const ClassId y = trial % 3;
    const auto m = adm_margins(row, conn, y);
    CHECK(m[y] == 0.0);
    for (ClassId t = 0; t < 3; ++t) {
      if (t == y) continue;
      const double bound = js_divergence(row, conn.row(y)) / js_divergence(conn.row(t), conn.row(y));
      CHECK(std::abs(m[t]) <= bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("base losses") {
  const std::vector<std::int64_t> c{30, 30, 3};
  const auto bs = balanced_softmax_margins(c);
  CHECK(bs == Vec{std::log(30.0), std::log(30.0), std::log(3.0)});
  CHECK(balanced_softmax_margins(std::vector<std::int64_t>{1, 1}) == Vec{0, 0});

  const auto w = reweight_weights(std::vector<std::int64_t>{10, 1});
  CHECK(w[0] == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(5.5).epsilon(1e-15));
  CHECK(reweight_weights(std::vector<std::int64_t>{4, 4, 4}) == Vec{1, 1, 1});

  const std::vector<std::int64_t> odd{7, 2, 19, 1};
  const auto wo = reweight_weights(odd);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    num += static_cast<double>(odd[k]) * wo[k];
    den += static_cast<double>(odd[k]);
  }
  CHECK(num / den == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(parse_base_loss("bs") == BaseLoss::kBalancedSoftmax);
  CHECK(parse_base_loss("reweight") == BaseLoss::kReweight);
  CHECK(to_string(BaseLoss::kCrossEntropy) == "ce");
  CHECK_THROWS_AS(parse_base_loss("focal"), ConfigError);
}

TEST_CASE("Balanced Softmax with equal counts is plain cross-entropy") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor logits = testing::random_tensor(12, 4, rng, 2.0);
    const auto base = balanced_softmax_margins(std::vector<std::int64_t>(4, 37));
    const MarginTensor m = base_margins(12, 4, base);
    std::vector<ClassId> y(12);
    for (std::size_t i = 0; i < 12; ++i) y[i] = static_cast<ClassId>((i * 7 + trial) % 4);
    CHECK(std::abs(margin_softmax_xent_value(logits, m.combined(), y, {}) -
                   margin_softmax_xent_value(logits, Tensor{}, y, {})) <= 1e-9);
  }
}

TEST_CASE("assemble_tam") {
  const Tensor conn = Tensor::from_rows({{0.8, 0.1, 0.1}, {0.2, 0.7, 0.1}, {0.1, 0.1, 0.8}});
  const std::vector<ClassId> labels{0, 1, 0};
  const NldMatrix nld{{0, 1, 2}, Tensor::from_rows({{0.4, 0.3, 0.3}, {0.2, 0.7, 0.1}, {0.2, 0.7, 0.1}})};
  const Vec base{1.0, 2.0, 3.0};

  TamConfig cfg;
  const MarginTensor off = assemble_tam(nld, conn, labels, cfg, base, 50);
  CHECK(off.combined() == Tensor::from_rows({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}}));

  cfg.alpha = 1.0;
  cfg.beta = 0.0;
  const MarginTensor acm = assemble_tam(nld, conn, labels, cfg, {}, 6);
  CHECK(std::abs(acm.combined()(0, 1) - (-std::log(6.0))) <= 1e-12);
  CHECK(acm.combined()(1, 1) == 0.0);

  cfg.beta = 0.5;
  const MarginTensor warm = assemble_tam(nld, conn, labels, cfg, base, 5);
  CHECK(warm.combined() == off.combined());
  CHECK(warm.acm == Tensor(3, 3));

  const MarginTensor full = assemble_tam(nld, conn, labels, cfg, base, 6);
  CHECK(std::abs(full.adm(2, 1) - (-1.0)) <= 1e-9);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(full.acm(i, labels[i]) == 0.0);
    CHECK(full.adm(i, labels[i]) == 0.0);
  }

  // positive homogeneity in each coefficient
  TamConfig twice = cfg;
  twice.alpha = 2.0;
  twice.beta = 1.0;
  const MarginTensor doubled = assemble_tam(nld, conn, labels, twice, base, 6);
  CHECK(doubled.acm == full.acm);
  CHECK(doubled.adm == full.adm);
  for (std::size_t i = 0; i < 9; ++i) {
    const double tam_part = full.combined().data()[i] - full.base.data()[i];
    const double doubled_part = doubled.combined().data()[i] - doubled.base.data()[i];
    CHECK(doubled_part == doctest::Approx(2.0 * tam_part).epsilon(1e-14));
  }
}

TEST_CASE("TamConfig validation") {
  TamConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.alpha = 0.5;
  cfg.phi = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
