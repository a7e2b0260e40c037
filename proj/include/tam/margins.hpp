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
#include "tam/tensor.hpp"
#include "tam/topology.hpp"

namespace tam {

enum class BaseLoss { kCrossEntropy, kReweight, kBalancedSoftmax };

std::string to_string(BaseLoss loss);
BaseLoss parse_base_loss(const std::string& name);

struct TamConfig {
  double alpha = 0.0;  // ACM coefficient
  double beta = 0.0;   // ADM coefficient
  double phi = 1.0;    // temperature scale
  double delta = 0.4;  // temperature sensitivity to imbalance
  int warmup_epochs = 5;
  BaseLoss base_loss = BaseLoss::kCrossEntropy;

  bool enabled() const noexcept { return alpha != 0.0 || beta != 0.0; }
  void validate() const;
};

/// Jensen-Shannon divergence, natural log, 0 log 0 = 0.
double js_divergence(std::span<const double> p, std::span<const double> q);

/// Connectivity margin of one node of class y:
///   m_t = -max(log((C[y,y] / D[y]) * (D[t] / C[y,t])), 0),  m_y = 0.
std::vector<double> acm_margins(std::span<const double> nld_row, const Tensor& conn, ClassId y);

/// Law-of-cosines angle at the self-class vertex from the three side
/// lengths; nullopt when either adjacent side is zero. Clamped to [-1, 1].
std::optional<double> cos_from_sides(double self_to_node, double self_to_target,
                                     double node_to_target);

/// cos of the angle between (C_y -> D_v) and (C_y -> C_t) with JS as the
/// distance.
std::optional<double> cos_angle(std::span<const double> nld_row, const Tensor& conn, ClassId y,
                                ClassId t);

/// Distribution margin: m_t = -JS(D_v, C_y) cos A_t / JS(C_t, C_y); 0 at the
/// self class and wherever the angle is undefined.
std::vector<double> adm_margins(std::span<const double> nld_row, const Tensor& conn, ClassId y);

/// Balanced Softmax margin: log N_k.
std::vector<double> balanced_softmax_margins(std::span<const std::int64_t> counts);

/// Inverse-frequency class weights mean(N) / N_k.
std::vector<double> reweight_weights(std::span<const std::int64_t> counts);

/// Per-node margin components for the labeled rows of an NldMatrix.
struct MarginTensor {
  Tensor base;
  Tensor acm;
  Tensor adm;
  double alpha = 0.0;
  double beta = 0.0;

  /// base + alpha * acm + beta * adm
  Tensor combined() const;
};

/// Margins for every row of `nld`. `base` is a per-class vector added to
/// every row (empty for none). For epoch <= warmup_epochs, or when both
/// coefficients are zero, the ACM/ADM components are left at zero.
MarginTensor assemble_tam(const NldMatrix& nld, const Tensor& conn,
                          std::span<const ClassId> labels, const TamConfig& cfg,
                          std::span<const double> base, int epoch);

/// Base margins only (no topology terms), `rows` x |base|.
MarginTensor base_margins(std::size_t rows, std::size_t num_classes, std::span<const double> base);

}  // namespace tam
