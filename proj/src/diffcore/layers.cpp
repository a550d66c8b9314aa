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

#include "planrl/diffcore/layers.hpp"

#include <cmath>

namespace planrl::diff {

namespace {

Matrix uniform_init(int rows, int cols, double limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  // Fill row by row so the draw order does not depend on storage order.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

}  // namespace

Var activate(Tape& tape, Var x, Activation act) {
  switch (act) {
    case Activation::relu: return tape.relu(x);
    case Activation::tanh: return tape.tanh(x);
    case Activation::identity: break;
  }
  return x;
}

Linear::Linear(ParamStore& store, const std::string& name, int in, int out, Rng& rng, bool zero_init)
    : in_(in), out_(out) {
  if (in <= 0 || out <= 0) throw ConfigError("linear layer '" + name + "' needs positive widths");
  const double limit = 1.0 / std::sqrt(static_cast<double>(in));
  w_ = store.add(name + ".w", zero_init ? Matrix::Zero(in, out) : uniform_init(in, out, limit, rng));
  b_ = store.add(name + ".b", Matrix::Zero(1, out));
}

Var Linear::forward(Tape& tape, ParamStore& store, Var x, bool trainable) const {
  if (x.cols() != in_) {
    throw ConfigError("linear layer expects width " + std::to_string(in_) + ", got " +
                      std::to_string(x.cols()));
  }
  return tape.matmul(x, tape.param(store, w_, trainable)) + tape.param(store, b_, trainable);
}

void MlpSpec::validate() const {
  if (input <= 0) throw ConfigError("MLP input width must be positive");
  if (widths.empty()) throw ConfigError("MLP needs at least one layer");
  for (int w : widths) {
    if (w <= 0) throw ConfigError("MLP layer widths must be positive");
  }
}

Mlp::Mlp(ParamStore& store, const std::string& name, MlpSpec spec, Rng& rng, bool zero_last)
    : spec_(std::move(spec)) {
  spec_.validate();
  int in = spec_.input;
  for (std::size_t i = 0; i < spec_.widths.size(); ++i) {
    const bool last = i + 1 == spec_.widths.size();
    layers_.emplace_back(store, name + "." + std::to_string(i), in, spec_.widths[i], rng, last && zero_last);
    in = spec_.widths[i];
  }
}

Var Mlp::forward(Tape& tape, ParamStore& store, Var x, bool trainable) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].forward(tape, store, x, trainable);
    x = activate(tape, x, i + 1 == layers_.size() ? spec_.output : spec_.hidden);
  }
  return x;
}

void RecurrentCellSpec::validate() const {
  if (input <= 0 || hidden <= 0) throw ConfigError("recurrent cell widths must be positive");
}

RecurrentCell::RecurrentCell(ParamStore& store, const std::string& name, RecurrentCellSpec spec, Rng& rng)
    : spec_(spec) {
  spec_.validate();
  const int gates = spec_.kind == CellKind::gru ? 3 : 4;
  const int width = gates * spec_.hidden;
  wx_ = store.add(name + ".wx", uniform_init(spec_.input, width, 1.0 / std::sqrt(spec_.input), rng));
  wh_ = store.add(name + ".wh", uniform_init(spec_.hidden, width, 1.0 / std::sqrt(spec_.hidden), rng));
  bx_ = store.add(name + ".bx", Matrix::Zero(1, width));
  if (spec_.kind == CellKind::gru) bh_ = store.add(name + ".bh", Matrix::Zero(1, width));
}

RecurrentState RecurrentCell::zero_state(Tape& tape, Eigen::Index batch) const {
  RecurrentState s;
  s.h = tape.constant(Matrix::Zero(batch, spec_.hidden));
  if (spec_.kind == CellKind::lstm) s.c = tape.constant(Matrix::Zero(batch, spec_.hidden));
  return s;
}

RecurrentState RecurrentCell::state_from(Tape& tape, Var h) const {
  if (h.cols() != spec_.hidden) throw ConfigError("initial hidden state has the wrong width");
  RecurrentState s;
  s.h = h;
  if (spec_.kind == CellKind::lstm) s.c = tape.constant(Matrix::Zero(h.rows(), spec_.hidden));
  return s;
}

std::pair<RecurrentState, Var> RecurrentCell::step(Tape& tape, ParamStore& store, const RecurrentState& state,
                                                   Var input, bool trainable) const {
  const int H = spec_.hidden;
  if (input.cols() != spec_.input) {
    throw ConfigError("recurrent cell expects input width " + std::to_string(spec_.input) + ", got " +
                      std::to_string(input.cols()));
  }
  if (!state.h.valid() || state.h.cols() != H) throw ConfigError("recurrent hidden state has the wrong width");
  if (state.h.rows() != input.rows()) throw ConfigError("recurrent state and input batch sizes differ");

  Var wx = tape.param(store, wx_, trainable);
  Var wh = tape.param(store, wh_, trainable);
  Var bx = tape.param(store, bx_, trainable);

  if (spec_.kind == CellKind::gru) {
    Var bh = tape.param(store, bh_, trainable);
    Var xs = tape.matmul(input, wx) + bx;
    Var hs = tape.matmul(state.h, wh) + bh;
    Var r = tape.sigmoid(tape.slice_cols(xs, 0, H) + tape.slice_cols(hs, 0, H));
    Var u = tape.sigmoid(tape.slice_cols(xs, H, H) + tape.slice_cols(hs, H, H));
    Var n = tape.tanh(tape.slice_cols(xs, 2 * H, H) + r * tape.slice_cols(hs, 2 * H, H));
    // (1 - u) * n + u * h  ==  n + u * (h - n)
    Var h = n + u * (state.h - n);
    return {RecurrentState{h, {}}, h};
  }

  if (!state.c.valid() || state.c.cols() != H) throw ConfigError("LSTM cell memory has the wrong width");
  Var gates = tape.matmul(input, wx) + tape.matmul(state.h, wh) + bx;
  Var i = tape.sigmoid(tape.slice_cols(gates, 0, H));
  Var f = tape.sigmoid(tape.slice_cols(gates, H, H));
  Var g = tape.tanh(tape.slice_cols(gates, 2 * H, H));
  Var o = tape.sigmoid(tape.slice_cols(gates, 3 * H, H));
  Var c = f * state.c + i * g;
  Var h = o * tape.tanh(c);
  return {RecurrentState{h, c}, h};
}

}  // namespace planrl::diff
