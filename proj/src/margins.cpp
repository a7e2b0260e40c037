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

#include "tam/margins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tam {

std::string to_string(BaseLoss loss) {
  switch (loss) {
    case BaseLoss::kCrossEntropy:
      return "ce";
    case BaseLoss::kReweight:
      return "reweight";
    case BaseLoss::kBalancedSoftmax:
      return "balanced_softmax";
  }
  return "ce";
}

BaseLoss parse_base_loss(const std::string& name) {
  if (name == "ce") return BaseLoss::kCrossEntropy;
  if (name == "reweight" || name == "rw") return BaseLoss::kReweight;
  if (name == "balanced_softmax" || name == "bs") return BaseLoss::kBalancedSoftmax;
  throw ConfigError("unknown base loss '" + name + "' (expected ce, reweight, balanced_softmax)");
}

void TamConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (!(phi > 0.0)) throw ConfigError("phi must be > 0");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in [0,1]");
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be >= 0");
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("js_divergence: length mismatch");
  double kl_pm = 0.0;
  double kl_qm = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) kl_pm += p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) kl_qm += q[i] * std::log(q[i] / m);
  }
  return std::max(0.5 * kl_pm + 0.5 * kl_qm, 0.0);
}

std::vector<double> acm_margins(std::span<const double> nld_row, const Tensor& conn, ClassId y) {
  const std::size_t c = nld_row.size();
  std::vector<double> m(c, 0.0);
  const double self_ratio = conn(y, y) / nld_row[y];
  for (std::size_t t = 0; t < c; ++t) {
    if (static_cast<ClassId>(t) == y) continue;
    const double ratio = self_ratio * (nld_row[t] / ratio_denominator(conn(y, t)));
    m[t] = ratio > 1.0 ? -std::log(ratio) : 0.0;
  }
  return m;
}

std::optional<double> cos_from_sides(double self_to_node, double self_to_target,
                                     double node_to_target) {
  if (self_to_node <= 0.0 || self_to_target <= 0.0) return std::nullopt;
  const double raw = (self_to_node * self_to_node + self_to_target * self_to_target -
                      node_to_target * node_to_target) /
                     (2.0 * self_to_node * self_to_target);
  return std::clamp(raw, -1.0, 1.0);
}

std::optional<double> cos_angle(std::span<const double> nld_row, const Tensor& conn, ClassId y,
                                ClassId t) {
  return cos_from_sides(js_divergence(nld_row, conn.row(y)), js_divergence(conn.row(t), conn.row(y)),
                        js_divergence(nld_row, conn.row(t)));
}

namespace {

// adm for one row given precomputed JS(C_t, C_y) for all t.
void adm_row(std::span<const double> nld_row, const Tensor& conn, ClassId y,
             std::span<const double> class_js_to_y, std::span<double> out) {
  const double to_self = js_divergence(nld_row, conn.row(y));
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = 0.0;
    if (static_cast<ClassId>(t) == y) continue;
    const auto cos = cos_from_sides(to_self, class_js_to_y[t], js_divergence(nld_row, conn.row(t)));
    if (!cos) continue;
    out[t] = -to_self * *cos / class_js_to_y[t];
  }
}

}  // namespace

std::vector<double> adm_margins(std::span<const double> nld_row, const Tensor& conn, ClassId y) {
  const std::size_t c = nld_row.size();
  std::vector<double> class_js(c);
  for (std::size_t t = 0; t < c; ++t) class_js[t] = js_divergence(conn.row(t), conn.row(y));
  std::vector<double> m(c);
  adm_row(nld_row, conn, y, class_js, m);
  return m;
}

std::vector<double> balanced_softmax_margins(std::span<const std::int64_t> counts) {
  std::vector<double> m(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) m[k] = std::log(static_cast<double>(counts[k]));
  return m;
}

std::vector<double> reweight_weights(std::span<const std::int64_t> counts) {
  const double mean =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0})) /
      static_cast<double>(counts.size());
  std::vector<double> w(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) w[k] = mean / static_cast<double>(counts[k]);
  return w;
}

Tensor MarginTensor::combined() const {
  Tensor out = base;
  auto o = out.data();
  const auto a = acm.data();
  const auto d = adm.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += alpha * a[i] + beta * d[i];
  return out;
}

MarginTensor base_margins(std::size_t rows, std::size_t num_classes, std::span<const double> base) {
  MarginTensor m;
  m.base = Tensor(rows, num_classes);
  m.acm = Tensor(rows, num_classes);
  m.adm = Tensor(rows, num_classes);
  if (!base.empty()) {
    if (base.size() != num_classes) throw ShapeError("base margin length must equal class count");
    for (std::size_t i = 0; i < rows; ++i) std::copy(base.begin(), base.end(), m.base.row(i).begin());
  }
  return m;
}

MarginTensor assemble_tam(const NldMatrix& nld, const Tensor& conn,
                          std::span<const ClassId> labels, const TamConfig& cfg,
                          std::span<const double> base, int epoch) {
  const std::size_t c = conn.cols();
  MarginTensor m = base_margins(nld.nodes.size(), c, base);
  m.alpha = cfg.alpha;
  m.beta = cfg.beta;
  if (epoch <= cfg.warmup_epochs || !cfg.enabled()) return m;

  // JS between class rows, shared by every node of the same class
  Tensor class_js(c, c);
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a + 1; b < c; ++b) {
      class_js(a, b) = class_js(b, a) = js_divergence(conn.row(a), conn.row(b));
    }
  }
  for (std::size_t i = 0; i < nld.nodes.size(); ++i) {
    const ClassId y = labels[nld.nodes[i]];
    const auto row = nld.rows.row(i);
    if (cfg.alpha != 0.0) {
      const auto acm = acm_margins(row, conn, y);
      std::copy(acm.begin(), acm.end(), m.acm.row(i).begin());
    }
    if (cfg.beta != 0.0) adm_row(row, conn, y, class_js.row(y), m.adm.row(i));
  }
  return m;
}

}  // namespace tam
