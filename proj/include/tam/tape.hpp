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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tam/core.hpp"
#include "tam/tensor.hpp"

namespace tam {

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode tape over dense matrices.
///
/// Every op evaluates eagerly and records a closure that maps the output
/// gradient back onto its inputs. A tape is built for one forward pass and
/// discarded afterwards. Sparse operands passed to `spmm` must outlive the tape.
class Tape {
 public:
  Var constant(Tensor value);
  Var parameter(Tensor value);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  /// x (n x c) + bias (1 x c) broadcast over rows.
  Var add_bias(Var x, Var bias);
  Var relu(Var x);
  /// Inverted dropout; identity when `train` is false or p == 0.
  Var dropout(Var x, double p, Rng& rng, bool train);
  Var softmax_rows(Var x);
  Var spmm(const SparseMatrix& a, Var x);
  Var gather_rows(Var x, std::span<const NodeId> rows);

  /// Weighted mean over rows of -log softmax(logits_i + margins_i)[target_i],
  /// normalized by the summed weights of the targets. Margins are constants.
  /// Returns a 1x1 value.
  Var margin_softmax_xent(Var logits, const Tensor& margins, std::span<const ClassId> targets,
                          std::span<const double> class_weights);

  /// Seeds d(out)/d(out) = 1 (out must be 1x1) and runs the recorded closures
  /// in reverse.
  void backward(Var out);
  /// Same with an explicit output cotangent.
  void backward(Var out, const Tensor& seed);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  /// Gradient of the last backward pass; zero tensor if none reached `v`.
  const Tensor& grad(Var v);
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::function<void(Tape&, std::size_t)> backward;
  };

  Var push(Tensor value, bool requires_grad, std::function<void(Tape&, std::size_t)> backward);
  Tensor& grad_slot(std::size_t id);
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }

  std::vector<Node> nodes_;
};

/// Value-only variant of margin_softmax_xent (no tape).
double margin_softmax_xent_value(const Tensor& logits, const Tensor& margins,
                                 std::span<const ClassId> targets,
                                 std::span<const double> class_weights);

/// Row-wise softmax with max subtraction.
Tensor softmax_rows(const Tensor& x);

}  // namespace tam
