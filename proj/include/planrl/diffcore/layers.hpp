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

#include <string>
#include <utility>
#include <vector>

#include "planrl/diffcore/tape.hpp"

namespace planrl::diff {

enum class Activation { identity, relu, tanh };

Var activate(Tape& tape, Var x, Activation act);

/// Fully connected layer, y = x W + b. W is in x out, b is 1 x out.
///
/// Weights start uniform in +-1/sqrt(in); biases start at zero. With
/// `zero_init` the weights are zero too.
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, int in, int out, Rng& rng,
         bool zero_init = false);

  Var forward(Tape& tape, ParamStore& store, Var x, bool trainable) const;

  int in() const { return in_; }
  int out() const { return out_; }
  ParamId weight() const { return w_; }
  ParamId bias() const { return b_; }

 private:
  int in_ = 0;
  int out_ = 0;
  ParamId w_ = 0;
  ParamId b_ = 0;
};

/// `[K] x N` feed-forward stack: widths lists every layer's output size, the
/// last entry being the output layer.
struct MlpSpec {
  int input = 0;
  std::vector<int> widths;
  Activation hidden = Activation::relu;
  Activation output = Activation::identity;

  void validate() const;
  int output_width() const { return widths.back(); }
};

class Mlp {
 public:
  Mlp() = default;
  // `zero_last` zero-initializes the output layer.
  Mlp(ParamStore& store, const std::string& name, MlpSpec spec, Rng& rng, bool zero_last = false);

  Var forward(Tape& tape, ParamStore& store, Var x, bool trainable) const;

  const MlpSpec& spec() const { return spec_; }
  const std::vector<Linear>& layers() const { return layers_; }

 private:
  MlpSpec spec_;
  std::vector<Linear> layers_;
};

enum class CellKind { gru, lstm };

struct RecurrentCellSpec {
  CellKind kind = CellKind::gru;
  int input = 0;
  int hidden = 0;

  void validate() const;
};

/// Hidden state of a cell. `c` is only used by the LSTM.
struct RecurrentState {
  Var h;
  Var c;
};

/// Gated recurrent cell.
///
/// GRU (biases bx, bh as in the cuDNN formulation):
///   r = sig(x Wxr + bxr + h Whr + bhr)
///   u = sig(x Wxu + bxu + h Whu + bhu)
///   n = tanh(x Wxn + bxn + r * (h Whn + bhn))
///   h' = (1 - u) * n + u * h
/// LSTM (single bias bx, gate order i, f, g, o):
///   c' = sig(f) * c + sig(i) * tanh(g)
///   h' = sig(o) * tanh(c')
/// The step output is h'.
class RecurrentCell {
 public:
  RecurrentCell() = default;
  RecurrentCell(ParamStore& store, const std::string& name, RecurrentCellSpec spec, Rng& rng);

  RecurrentState zero_state(Tape& tape, Eigen::Index batch) const;
  // Builds a state from an initial hidden vector (LSTM cell memory starts at 0).
  RecurrentState state_from(Tape& tape, Var h) const;

  std::pair<RecurrentState, Var> step(Tape& tape, ParamStore& store, const RecurrentState& state,
                                      Var input, bool trainable) const;

  const RecurrentCellSpec& spec() const { return spec_; }
  ParamId wx() const { return wx_; }
  ParamId wh() const { return wh_; }
  ParamId bx() const { return bx_; }
  ParamId bh() const { return bh_; }

 private:
  RecurrentCellSpec spec_;
  ParamId wx_ = 0;
  ParamId wh_ = 0;
  ParamId bx_ = 0;
  ParamId bh_ = 0;  // GRU only
};

}  // namespace planrl::diff
