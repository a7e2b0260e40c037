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
#include <random>
#include <stdexcept>
#include <string>

namespace tam {

using NodeId = std::int32_t;
using ClassId = std::int32_t;

inline constexpr ClassId kUnlabeled = -1;

// All seeded randomness in the library flows through this engine.
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; message carries "<path>:<line>".
class ParseError : public Error {
 public:
  using Error::Error;
};

// Inconsistent sizes between inputs (feature rows vs labels, operand shapes).
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment or split configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tam
