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

#include "tam/models.hpp"

#include <cmath>

namespace tam {

std::string to_string(Arch arch) { return arch == Arch::kGcn ? "gcn" : "sage"; }

Arch parse_arch(const std::string& name) {
  if (name == "gcn" || name == "GCN") return Arch::kGcn;
  if (name == "sage" || name == "SAGE") return Arch::kSage;
  throw ConfigError("unknown architecture '" + name + "' (expected gcn or sage)");
}

void ModelConfig::validate() const {
  if (num_layers < 1 || num_layers > 3) throw ConfigError("num_layers must be 1, 2 or 3");
  if (hidden_dim == 0 || in_dim == 0 || out_dim == 0) throw ConfigError("model dims must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0,1)");
}

namespace {

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor w(fan_in, fan_out);
  for (auto& x : w.data()) x = dist(rng);
  return w;
}

// A h W evaluated in whichever order keeps the sparse product narrower.
// The first layer's input is the constant feature matrix, so A X comes
// precomputed.
Var propagate_then_project(Tape& tape, const ModelInputs& in, int layer, Var h, Var weight) {
  const Tensor& w = tape.value(weight);
  if (w.rows() <= w.cols()) {
    const Var ah = layer == 0 ? tape.constant(in.propagated_features) : tape.spmm(in.propagation, h);
    return tape.matmul(ah, weight);
  }
  return tape.spmm(in.propagation, tape.matmul(h, weight));
}

}  // namespace

ParamSet init_params(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  ParamSet ps;
  ps.arch = config.arch;
  ps.num_layers = config.num_layers;
  for (int l = 0; l < config.num_layers; ++l) {
    const std::size_t in = l == 0 ? config.in_dim : config.hidden_dim;
    const std::size_t out = l == config.num_layers - 1 ? config.out_dim : config.hidden_dim;
    const bool decay = l != config.num_layers - 1;
    ps.params.push_back(Parameter{glorot(in, out, rng), Tensor(in, out), decay});
    if (config.arch == Arch::kSage) {
      ps.params.push_back(Parameter{glorot(in, out, rng), Tensor(in, out), decay});
    }
    ps.params.push_back(Parameter{Tensor(1, out), Tensor(1, out), decay});
  }
  return ps;
}

ModelInputs make_inputs(SparseMatrix propagation, Tensor features) {
  ModelInputs in;
  in.propagated_features = spmm(propagation, features);
  in.propagation = std::move(propagation);
  in.features = std::move(features);
  return in;
}

ModelInputs make_inputs(const Graph& graph, Arch arch) {
  return make_inputs(arch == Arch::kGcn ? normalized_adjacency(graph) : mean_aggregation(graph),
                     graph.features());
}

std::vector<Var> bind_params(Tape& tape, const ParamSet& params) {
  std::vector<Var> vars;
  vars.reserve(params.params.size());
  for (const auto& p : params.params) vars.push_back(tape.parameter(p.value));
  return vars;
}

void collect_grads(Tape& tape, std::span<const Var> bound, ParamSet& params) {
  for (std::size_t i = 0; i < bound.size(); ++i) params.params[i].grad = tape.grad(bound[i]);
}

Var gcn_forward(Tape& tape, const ModelInputs& in, const ParamSet& params,
                std::span<const Var> bound, double dropout, Rng& rng, bool train) {
  Var h = tape.constant(in.features);
  for (int l = 0; l < params.num_layers; ++l) {
    const bool last = l == params.num_layers - 1;
    if (last && params.num_layers > 1) h = tape.dropout(h, dropout, rng, train);
    h = tape.add_bias(propagate_then_project(tape, in, l, h, bound[l * 2]), bound[l * 2 + 1]);
    if (!last) h = tape.relu(h);
  }
  return h;
}

Var sage_forward(Tape& tape, const ModelInputs& in, const ParamSet& params,
                 std::span<const Var> bound, double dropout, Rng& rng, bool train) {
  Var h = tape.constant(in.features);
  for (int l = 0; l < params.num_layers; ++l) {
    const bool last = l == params.num_layers - 1;
    if (last && params.num_layers > 1) h = tape.dropout(h, dropout, rng, train);
    Var self = tape.matmul(h, bound[l * 3]);
    Var nbr = propagate_then_project(tape, in, l, h, bound[l * 3 + 1]);
    h = tape.add_bias(tape.add(self, nbr), bound[l * 3 + 2]);
    if (!last) h = tape.relu(h);
  }
  return h;
}

Var model_forward(Tape& tape, const ModelInputs& in, const ParamSet& params,
                  std::span<const Var> bound, double dropout, Rng& rng, bool train) {
  return params.arch == Arch::kGcn ? gcn_forward(tape, in, params, bound, dropout, rng, train)
                                   : sage_forward(tape, in, params, bound, dropout, rng, train);
}

Tensor predict_logits(const ModelInputs& in, const ParamSet& params) {
  Tape tape;
  Rng unused(0);
  const auto bound = bind_params(tape, params);
  return tape.value(model_forward(tape, in, params, bound, 0.0, unused, false));
}

}  // namespace tam
