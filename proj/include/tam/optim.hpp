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

#include <limits>
#include <span>
#include <vector>

#include "tam/tensor.hpp"

namespace tam {

/// A learnable tensor with its gradient slot.
struct Parameter {
  Tensor value;
  Tensor grad;
  bool decay = true;  // false exempts it from weight decay
};

struct AdamState {
  long step = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

/// One bias-corrected Adam step. Weight decay is L2 folded into the gradient
/// (g + wd * theta) for parameters with `decay` set. Moment buffers are
/// created on the first call.
void adam_step(AdamState& state, std::span<Parameter> params);

/// Halves the learning rate once the best validation loss has gone
/// `patience` epochs without improvement (the epoch that set the best counts
/// as the first). The window restarts on improvement and after each halving.
class PlateauScheduler {
 public:
  PlateauScheduler(double initial_lr, int patience, double factor = 0.5)
      : lr_(initial_lr), patience_(patience), factor_(factor) {}

  /// Feed one epoch's validation loss; returns the learning rate for the
  /// next epoch.
  double step(double val_loss);
  double lr() const noexcept { return lr_; }
  double best() const noexcept { return best_; }

 private:
  double lr_;
  int patience_;
  double factor_;
  double best_ = std::numeric_limits<double>::infinity();
  int window_ = 0;
};

}  // namespace tam
