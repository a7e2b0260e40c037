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

#include "tam/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tam {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

void accumulate(Tensor& dst, const Tensor& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

// Fills probs with softmax(row) and returns log-sum-exp of the row.
double softmax_row(std::span<const double> row, std::span<double> probs) {
  const double mx = *std::max_element(row.begin(), row.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    probs[j] = std::exp(row[j] - mx);
    sum += probs[j];
  }
  for (auto& p : probs) p /= sum;
  return mx + std::log(sum);
}

struct XentForward {
  double loss = 0.0;
  Tensor probs;  // softmax(logits + margins)
  std::vector<double> row_weight;
  double weight_sum = 0.0;
};

XentForward xent_forward(const Tensor& logits, const Tensor& margins,
                         std::span<const ClassId> targets, std::span<const double> class_weights) {
  const std::size_t n = logits.rows();
  const std::size_t c = logits.cols();
  if (!margins.empty()) require_same_shape(logits, margins, "margin_softmax_xent");
  if (targets.size() != n) throw ShapeError("margin_softmax_xent: one target per row required");
  if (!class_weights.empty() && class_weights.size() != c) {
    throw ShapeError("margin_softmax_xent: one weight per class required");
  }
  XentForward f;
  f.probs = Tensor(n, c);
  f.row_weight.resize(n);
  std::vector<double> z(c);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const ClassId y = targets[i];
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw ShapeError("margin_softmax_xent: target " + std::to_string(y) + " out of range");
    }
    for (std::size_t j = 0; j < c; ++j) {
      const double l = logits(i, j);
      if (!std::isfinite(l)) throw NumericError("margin_softmax_xent: non-finite logit");
      z[j] = l + (margins.empty() ? 0.0 : margins(i, j));
    }
    const double lse = softmax_row(z, f.probs.row(i));
    const double w = class_weights.empty() ? 1.0 : class_weights[y];
    f.row_weight[i] = w;
    f.weight_sum += w;
    total += w * (lse - z[y]);
  }
  f.loss = f.weight_sum > 0.0 ? total / f.weight_sum : 0.0;
  return f;
}

}  // namespace

Tensor softmax_rows(const Tensor& x) {
  Tensor out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) softmax_row(x.row(i), out.row(i));
  return out;
}

Var Tape::push(Tensor value, bool requires_grad, std::function<void(Tape&, std::size_t)> backward) {
  nodes_.push_back(Node{std::move(value), Tensor{}, requires_grad,
                        requires_grad ? std::move(backward) : nullptr});
  return Var{nodes_.size() - 1};
}

Tensor& Tape::grad_slot(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.grad.same_shape(n.value)) n.grad = Tensor(n.value.rows(), n.value.cols());
  return n.grad;
}

const Tensor& Tape::grad(Var v) { return grad_slot(v.id); }

Var Tape::constant(Tensor value) { return push(std::move(value), false, nullptr); }

Var Tape::parameter(Tensor value) { return push(std::move(value), true, nullptr); }

Var Tape::matmul(Var a, Var b) {
  Tensor out = tam::matmul(value(a), value(b));
  return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    if (t.needs(a)) add_matmul_nt(g, t.value(b), t.grad_slot(a.id));
    if (t.needs(b)) add_matmul_tn(t.value(a), g, t.grad_slot(b.id));
  });
}

Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  Tensor out = value(a);
  accumulate(out, value(b));
  return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    if (t.needs(a)) accumulate(t.grad_slot(a.id), g);
    if (t.needs(b)) accumulate(t.grad_slot(b.id), g);
  });
}

Var Tape::add_bias(Var x, Var bias) {
  const Tensor& xv = value(x);
  const Tensor& bv = value(bias);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    throw ShapeError("add_bias: bias must be 1x" + std::to_string(xv.cols()));
  }
  Tensor out = xv;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bv(0, j);
  }
  return push(std::move(out), needs(x) || needs(bias), [x, bias](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    if (t.needs(x)) accumulate(t.grad_slot(x.id), g);
    if (t.needs(bias)) {
      Tensor& gb = t.grad_slot(bias.id);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) gb(0, j) += g(i, j);
      }
    }
  });
}

Var Tape::relu(Var x) {
  Tensor out = value(x);
  for (auto& v : out.data()) v = v > 0.0 ? v : 0.0;
  return push(std::move(out), needs(x), [x](Tape& t, std::size_t self) {
    const auto g = t.nodes_[self].grad.data();
    const auto in = t.value(x).data();
    auto dst = t.grad_slot(x.id).data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (in[i] > 0.0) dst[i] += g[i];
    }
  });
}

Var Tape::dropout(Var x, double p, Rng& rng, bool train) {
  if (!(p >= 0.0 && p < 1.0)) throw ShapeError("dropout: rate must lie in [0,1)");
  if (!train || p == 0.0) return x;
  const double scale = 1.0 / (1.0 - p);
  Tensor mask(value(x).rows(), value(x).cols());
  for (auto& m : mask.data()) {
    // uniform in [0,1) from the top 53 bits
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    m = u < p ? 0.0 : scale;
  }
  Tensor out = value(x);
  auto o = out.data();
  auto m = mask.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= m[i];
  return push(std::move(out), needs(x), [x, mask = std::move(mask)](Tape& t, std::size_t self) {
    const auto g = t.nodes_[self].grad.data();
    const auto mk = mask.data();
    auto dst = t.grad_slot(x.id).data();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * mk[i];
  });
}

Var Tape::softmax_rows(Var x) {
  Tensor out = tam::softmax_rows(value(x));
  return push(std::move(out), needs(x), [x](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& s = t.nodes_[self].value;
    Tensor& dst = t.grad_slot(x.id);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < g.cols(); ++j) dot += g(i, j) * s(i, j);
      for (std::size_t j = 0; j < g.cols(); ++j) dst(i, j) += s(i, j) * (g(i, j) - dot);
    }
  });
}

Var Tape::spmm(const SparseMatrix& a, Var x) {
  Tensor out = tam::spmm(a, value(x));
  return push(std::move(out), needs(x), [&a, x](Tape& t, std::size_t self) {
    add_spmm_t(a, t.nodes_[self].grad, t.grad_slot(x.id));
  });
}

Var Tape::gather_rows(Var x, std::span<const NodeId> rows) {
  const Tensor& xv = value(x);
  Tensor out(rows.size(), xv.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || static_cast<std::size_t>(rows[i]) >= xv.rows()) {
      throw ShapeError("gather_rows: row index out of range");
    }
    std::copy_n(xv.row(rows[i]).begin(), xv.cols(), out.row(i).begin());
  }
  return push(std::move(out), needs(x),
              [x, idx = std::vector<NodeId>(rows.begin(), rows.end())](Tape& t, std::size_t self) {
                const Tensor& g = t.nodes_[self].grad;
                Tensor& dst = t.grad_slot(x.id);
                for (std::size_t i = 0; i < idx.size(); ++i) {
                  auto d = dst.row(idx[i]);
                  auto s = g.row(i);
                  for (std::size_t j = 0; j < s.size(); ++j) d[j] += s[j];
                }
              });
}

Var Tape::margin_softmax_xent(Var logits, const Tensor& margins, std::span<const ClassId> targets,
                              std::span<const double> class_weights) {
  XentForward f = xent_forward(value(logits), margins, targets, class_weights);
  Tensor out(1, 1, f.loss);
  return push(std::move(out), needs(logits),
              [logits, f = std::move(f), tg = std::vector<ClassId>(targets.begin(), targets.end())](
                  Tape& t, std::size_t self) {
                if (f.weight_sum <= 0.0) return;
                const double g = t.nodes_[self].grad(0, 0);
                Tensor& dst = t.grad_slot(logits.id);
                for (std::size_t i = 0; i < f.probs.rows(); ++i) {
                  const double s = g * f.row_weight[i] / f.weight_sum;
                  for (std::size_t j = 0; j < f.probs.cols(); ++j) {
                    dst(i, j) += s * (f.probs(i, j) - (static_cast<ClassId>(j) == tg[i] ? 1.0 : 0.0));
                  }
                }
              });
}

void Tape::backward(Var out) {
  if (value(out).rows() != 1 || value(out).cols() != 1) {
    throw ShapeError("backward: implicit seed requires a 1x1 output");
  }
  backward(out, Tensor(1, 1, 1.0));
}

void Tape::backward(Var out, const Tensor& seed) {
  require_same_shape(value(out), seed, "backward");
  for (auto& n : nodes_) n.grad = Tensor{};
  grad_slot(out.id) = seed;
  for (std::size_t i = out.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward && n.grad.same_shape(n.value)) n.backward(*this, i);
  }
}

double margin_softmax_xent_value(const Tensor& logits, const Tensor& margins,
                                 std::span<const ClassId> targets,
                                 std::span<const double> class_weights) {
  return xent_forward(logits, margins, targets, class_weights).loss;
}

}  // namespace tam
