// Copyright 2026 The planrl Authors.
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

#include <Eigen/Core>

namespace planrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Rng = std::mt19937_64;

// Invalid shapes, widths, or configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An API called out of order or with arguments outside its contract.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN/Inf in a loss, gradient, or network output.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// How the entries of a plan are expressed.
enum class Frame {
  raw,           // primitive actions
  ego_setpoint,  // positional setpoints relative to the agent
};

// Why a transition ended its episode (if it did).
enum class TerminalKind : std::uint8_t {
  none = 0,
  timeout = 1,  // step limit; bootstrapping stays on
  terminal = 2, // true terminal state; no bootstrap
};

// Axis-aligned action box.
struct ActionBounds {
  Vector low;
  Vector high;

  int dim() const { return static_cast<int>(low.size()); }
  Vector center() const { return 0.5 * (low + high); }
  Vector half_range() const { return 0.5 * (high - low); }
  Vector clamp(const Vector& a) const { return a.cwiseMax(low).cwiseMin(high); }

  static ActionBounds symmetric(int dim, double limit) {
    return {Vector::Constant(dim, -limit), Vector::Constant(dim, limit)};
  }
};

}  // namespace planrl
