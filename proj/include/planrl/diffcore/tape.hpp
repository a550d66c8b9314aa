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

#include <functional>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "planrl/diffcore/params.hpp"

namespace planrl::diff {

/// Elementwise tanh as 1 - 2 / (exp(2x) + 1), vectorized. Absolute error
/// stays below 1e-15; relative error grows near zero.
Matrix tanh_values(const Matrix& x);

class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;
  bool valid() const { return tape != nullptr && id >= 0; }
};

/// Reverse-mode recording of matrix operations.
///
/// Values are row-major in meaning: rows index the batch, columns index
/// features. Binary elementwise operations broadcast an operand with a single
/// row and/or a single column. A tape built with `record_gradients = false`
/// stores values only; it is used for rollout and target computation.
///
/// `backward` may be called once per recording; call `reset` to reuse.
class Tape {
 public:
  explicit Tape(bool record_gradients = true);

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  Var constant(Matrix value);
  Var input(Matrix value);
  Var param(ParamStore& store, ParamId id, bool trainable = true);
  Var detach(Var v);

  const Matrix& value(Var v) const;
  Matrix grad(Var v) const;
  bool requires_grad(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  /// Propagates d(loss)/d(node) to every node and accumulates into the
  /// gradient slots of trainable parameters.
  void backward(Var loss);
  void reset();

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var min(Var a, Var b);
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var neg(Var a) { return scale(a, -1.0); }

  Var relu(Var a);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var square(Var a);
  Var softplus(Var a);
  Var clamp(Var a, double lo, double hi);
  // Per-column bounds.
  Var clamp(Var a, const RowVector& lo, const RowVector& hi);

  Var sum(Var a);
  Var mean(Var a);
  Var row_sum(Var a);
  Var col_mean(Var a);

  Var concat_cols(std::span<const Var> parts);
  Var slice_cols(Var a, int start, int count);
  // out(i) = a(i, cols[i])
  Var pick(Var a, std::span<const int> cols);

 private:
  struct Node {
    Matrix value;
    // Parameter nodes read the store in place instead of holding a copy.
    const Matrix* ref = nullptr;
    Matrix grad;
    bool needs_grad = false;
    std::function<void(const Matrix&)> back;
    ParamStore* store = nullptr;
    ParamId param = 0;

    const Matrix& val() const { return ref != nullptr ? *ref : value; }
  };

  int push(Matrix value, bool needs_grad, std::function<void(const Matrix&)> back = {});
  bool needs(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].needs_grad; }
  void check(Var v) const;

  template <class Derived>
  void accumulate(int id, const Eigen::MatrixBase<Derived>& g);

  Var binary(Var a, Var b, int op);

  bool record_;
  bool backward_done_ = false;
  std::vector<Node> nodes_;
  std::map<std::tuple<const ParamStore*, ParamId, bool>, int> param_nodes_;
};

inline Var operator+(Var a, Var b) { return a.tape->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape->mul(a, b); }
inline Var operator*(double c, Var a) { return a.tape->scale(a, c); }
inline Var operator*(Var a, double c) { return a.tape->scale(a, c); }
inline Var operator+(Var a, double c) { return a.tape->add_scalar(a, c); }
inline Var operator-(Var a, double c) { return a.tape->add_scalar(a, -c); }
inline Var operator-(Var a) { return a.tape->neg(a); }

}  // namespace planrl::diff
