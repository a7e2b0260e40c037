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
#include <span>
#include <string>
#include <vector>

#include "tam/core.hpp"
#include "tam/graph.hpp"
#include "tam/optim.hpp"
#include "tam/tape.hpp"

namespace tam {

enum class Arch { kGcn, kSage };

std::string to_string(Arch arch);
Arch parse_arch(const std::string& name);

struct ModelConfig {
  Arch arch = Arch::kGcn;
  int num_layers = 2;
  std::size_t hidden_dim = 64;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  double dropout = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-layer parameters, flattened for the optimizer.
///
/// GCN layer l owns [weight, bias]; SAGE layer l owns [self weight, neighbor
/// weight, bias]. All parameters of the last layer have `decay == false`.
struct ParamSet {
  Arch arch = Arch::kGcn;
  int num_layers = 0;
  std::vector<Parameter> params;

  std::size_t per_layer() const noexcept { return arch == Arch::kGcn ? 2 : 3; }
  Parameter& weight(int layer) { return params[layer * per_layer()]; }
  const Parameter& weight(int layer) const { return params[layer * per_layer()]; }
  Parameter& neighbor_weight(int layer) { return params[layer * per_layer() + 1]; }
  const Parameter& neighbor_weight(int layer) const { return params[layer * per_layer() + 1]; }
  Parameter& bias(int layer) { return params[layer * per_layer() + per_layer() - 1]; }
  const Parameter& bias(int layer) const { return params[layer * per_layer() + per_layer() - 1]; }
};

/// Glorot-uniform weights, zero biases.
ParamSet init_params(const ModelConfig& config);

/// Graph-side inputs shared by every forward pass of a run: the
/// propagation operator (normalized adjacency for GCN, neighbor mean for
/// SAGE), the feature matrix and their product, which the first layer reuses.
struct ModelInputs {
  SparseMatrix propagation;
  Tensor features;
  Tensor propagated_features;
};

ModelInputs make_inputs(const Graph& graph, Arch arch);
ModelInputs make_inputs(SparseMatrix propagation, Tensor features);

/// Pushes every parameter onto the tape; the returned vars line up with
/// `params.params`.
std::vector<Var> bind_params(Tape& tape, const ParamSet& params);
/// Copies tape gradients into `params[i].grad`.
void collect_grads(Tape& tape, std::span<const Var> bound, ParamSet& params);

/// GCN: h <- A_hat h W + b per layer, ReLU between layers, dropout on the
/// input of the last layer in train mode when there is more than one layer.
Var gcn_forward(Tape& tape, const ModelInputs& in, const ParamSet& params,
                std::span<const Var> bound, double dropout, Rng& rng, bool train);

/// GraphSAGE (mean): h_v <- W_self h_v + W_nbr mean_{u in N(v)} h_u + b;
/// same activation/dropout protocol as GCN.
Var sage_forward(Tape& tape, const ModelInputs& in, const ParamSet& params,
                 std::span<const Var> bound, double dropout, Rng& rng, bool train);

/// Dispatches on params.arch.
Var model_forward(Tape& tape, const ModelInputs& in, const ParamSet& params,
                  std::span<const Var> bound, double dropout, Rng& rng, bool train);

/// Eval-mode logits without keeping the tape.
Tensor predict_logits(const ModelInputs& in, const ParamSet& params);

}  // namespace tam
