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

#include <span>
#include <vector>

#include "planrl/diffcore/layers.hpp"
#include "planrl/plangen/plan.hpp"

namespace planrl::plan {

enum class DecoderPrior {
  repeat,  // a[i] = a[i-1] + g
  linear,  // a[i] = a[i-1] + (a[i-1] - a[i-2]) + g
};

struct GeneratorConfig {
  int obs_dim = 0;
  ActionBounds bounds;
  int plan_length = 1;
  // Observation encoder widths, e.g. {100, 100} for "[100] x 2". The last
  // width is also the plan RNN hidden size.
  std::vector<int> hidden = {100, 100};
  DecoderPrior prior = DecoderPrior::repeat;
  Frame frame = Frame::raw;
  // Decoder residual is residual_scale * half_range * g(h).
  double residual_scale = 0.1;
  double log_std_min = -20.0;
  double log_std_max = 2.0;

  void validate() const;
};

struct PlanSample {
  Plan plan;
  double first_step_log_prob = 0.0;
  Vector noise;
};

/// Twin-min plan values consumed by the actor loss.
class PlanValueFunction {
 public:
  virtual ~PlanValueFunction() = default;
  // states: B x obs. actions: l entries of B x A in environment units.
  // Returns B x l, column k holding the value of the (k+1)-step prefix.
  virtual diff::Var min_values(diff::Tape& tape, diff::Var states, std::span<const diff::Var> actions,
                               bool trainable) const = 0;
};

/// Autoregressive stochastic actor emitting an L-step plan.
///
///   z = encoder(s), h = init(z)
///   a[0] = squash(mean(z) + std(z) * n),   n ~ N(0, I)
///   h[i] = GRU(h[i-1], stop_grad(a[i-1])), a[i] = clamp(a[i-1] (+ delta) + g(h[i]))
///
/// Only the first step is stochastic. squash maps R^A onto the action box via
/// center + half_range * tanh(u). The output layer of g starts at zero, so a
/// fresh generator emits plans that repeat their first action.
class PlanGenerator {
 public:
  struct Rollout {
    std::vector<diff::Var> actions;  // L entries, B x A
    diff::Var log_prob;              // B x 1, first step only
    diff::Var mean;                  // B x A, pre-squash
    diff::Var log_std;               // B x A, after clamping
  };

  struct DecodeStep {
    diff::RecurrentState hidden;
    diff::Var action;
  };

  PlanGenerator() = default;
  PlanGenerator(GeneratorConfig config, Rng& init_rng);

  /// Differentiable batched unroll. `noise` is B x A; a zero matrix gives the
  /// mode. `recurrent_inputs`, when non-empty, replaces the (already
  /// gradient-detached) previous actions fed to the plan RNN; it holds L-1
  /// matrices in normalized action units and exists so the stop-gradient can
  /// be checked from outside.
  Rollout rollout(diff::Tape& tape, diff::Var states, const Matrix& noise, bool trainable,
                  std::span<const Matrix> recurrent_inputs = {}) const;

  /// One decoder step. `before_prev` is only read by the linear prior; pass
  /// an invalid Var on the first decoded step (treated as a zero delta).
  DecodeStep decode_next(diff::Tape& tape, const diff::RecurrentState& hidden, diff::Var prev,
                         diff::Var before_prev, bool trainable,
                         const Matrix* recurrent_input = nullptr) const;

  /// The L-1 recurrent inputs a rollout fed to the plan RNN, as constants in
  /// the override format of rollout(). Gradient checks freeze these so the
  /// finite-difference loss sees the same severed path as backward().
  std::vector<Matrix> recurrent_inputs(const Rollout& r) const;

  PlanSample sample_plan(const Vector& state, Rng& rng) const;
  Plan mode_plan(const Vector& state) const;

  /// log density of the squashed-Gaussian first step, with the tanh and
  /// box-scaling corrections. Actions on or outside the bounds are pulled
  /// into the interior first.
  double first_step_log_prob(const Vector& state, const Vector& action) const;

  /// mean over batch of  alpha * log pi_0(a0|s) - mean_l Q_min(s, tau_l).
  /// Gradients reach only the generator parameters. `mean_log_prob`, when
  /// given, receives the batch mean of log pi_0 for the temperature update.
  diff::Var actor_loss(diff::Tape& tape, const Matrix& states, const PlanValueFunction& critic, double alpha,
                       const Matrix& noise, double* mean_log_prob = nullptr) const;

  Matrix draw_noise(Eigen::Index batch, Rng& rng) const;

  const GeneratorConfig& config() const { return config_; }
  diff::ParamStore& params() { return params_; }
  const diff::ParamStore& params() const { return params_; }

  const diff::Mlp& encoder() const { return encoder_; }
  const diff::Linear& mean_head() const { return mean_head_; }
  const diff::Linear& log_std_head() const { return log_std_head_; }
  const diff::Linear& residual_head() const { return residual_head_; }

 private:
  diff::Var squash(diff::Tape& tape, diff::Var u) const;
  diff::Var normalize(diff::Tape& tape, diff::Var action) const;

  GeneratorConfig config_;
  mutable diff::ParamStore params_;
  diff::Mlp encoder_;
  diff::Linear mean_head_;
  diff::Linear log_std_head_;
  diff::Linear init_head_;
  diff::RecurrentCell rnn_;
  diff::Linear residual_head_;
  RowVector center_;
  RowVector half_range_;
  RowVector low_;
  RowVector high_;
};

/// Stable log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u)).
diff::Var log_one_minus_tanh_sq(diff::Tape& tape, diff::Var u);

}  // namespace planrl::plan
