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


// Central finite-difference gradient checking for tape programs.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tam/tape.hpp"
#include "tam/tensor.hpp"

namespace tam::testing {

// |analytic - numeric| / max(|analytic|, |numeric|, floor). The floor keeps
// entries whose true derivative is (near) zero from dividing by rounding noise.
inline double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

using TapeProgram = std::function<Var(Tape&, const std::vector<Var>&)>;

inline Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Tensor t(rows, cols);
  std::normal_distribution<double> gauss(0.0, scale);
  for (auto& x : t.data()) x = gauss(rng);
  return t;
}

// Contracts the program output with a fixed random cotangent so that every
// output entry contributes, then compares d/d(input) against central
// differences for every entry of every input. Returns the worst relative error.
inline double gradient_check(const TapeProgram& program, std::vector<Tensor> inputs, double h,
                             double floor, std::uint64_t seed = 1) {
  Rng rng(seed);
  Tensor cotangent;
  auto scalar = [&](const std::vector<Tensor>& xs) {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& x : xs) vars.push_back(tape.parameter(x));
    const Tensor& out = tape.value(program(tape, vars));
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out.data()[i] * cotangent.data()[i];
    return s;
  };

  Tape tape;
  std::vector<Var> vars;
  for (const auto& x : inputs) vars.push_back(tape.parameter(x));
  const Var out = program(tape, vars);
  cotangent = random_tensor(tape.value(out).rows(), tape.value(out).cols(), rng);
  tape.backward(out, cotangent);

  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Tensor analytic = tape.grad(vars[k]);
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double x0 = inputs[k].data()[i];
      inputs[k].data()[i] = x0 + h;
      const double up = scalar(inputs);
      inputs[k].data()[i] = x0 - h;
      const double down = scalar(inputs);
      inputs[k].data()[i] = x0;
      worst = std::max(worst, relative_error(analytic.data()[i], (up - down) / (2.0 * h), floor));
    }
  }
  return worst;
}

}  // namespace tam::testing
