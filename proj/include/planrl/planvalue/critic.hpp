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

#include <array>
#include <span>
#include <vector>

#include "planrl/diffcore/layers.hpp"
#include "planrl/plangen/generator.hpp"
#include "planrl/replay/buffer.hpp"

namespace planrl::value {

struct CriticConfig {
  int obs_dim = 0;
  ActionBounds bounds;
  // hidden[0] is the state encoder width; the remaining widths form both
  // decoders' hidden layers; the LSTM width is hidden.back().
  std::vector<int> hidden = {100, 100};

  void validate() const;
};

using ValueSequence = std::vector<double>;

/// Recurrent plan-value network.
///
///   z = relu(W s + b)
///   Q_1 = dec0([z, a0])
///   (h, c) = (tanh(init(z)), 0), then LSTM over a0, a1, ...
///   Q_k = Q_{k-1} + dec(lstm output after a_{k-1}),  k >= 2
///
/// Actions are normalized onto [-1, 1] by the action bounds before entering
/// either decoder.
class PlanCritic {
 public:
  PlanCritic() = default;
  PlanCritic(CriticConfig config, Rng& init_rng);

  /// B x l prefix values. `actions` holds l entries of B x A.
  diff::Var value_sequence(diff::Tape& tape, diff::Var states, std::span<const diff::Var> actions,
                           bool trainable) const;

  ValueSequence value_sequence(const Vector& state, const plan::Plan& plan) const;

  const CriticConfig& config() const { return config_; }
  diff::ParamStore& params() { return params_; }
  const diff::ParamStore& params() const { return params_; }
  const diff::Mlp& first_decoder() const { return first_decoder_; }
  const diff::Mlp& step_decoder() const { return step_decoder_; }

 private:
  CriticConfig config_;
  mutable diff::ParamStore params_;
  diff::Linear encoder_;
  diff::Mlp first_decoder_;
  diff::Linear init_head_;
  diff::RecurrentCell lstm_;
  diff::Mlp step_decoder_;
  RowVector center_;
  RowVector inv_half_range_;
};

/// Twin critics with soft-updated target copies.
class CriticEnsemble : public plan::PlanValueFunction {
 public:
  CriticEnsemble() = default;
  CriticEnsemble(const CriticConfig& config, Rng& init_rng, double eta = 0.005);

  diff::Var min_values(diff::Tape& tape, diff::Var states, std::span<const diff::Var> actions,
                       bool trainable) const override;
  diff::Var target_min_values(diff::Tape& tape, diff::Var states, std::span<const diff::Var> actions) const;

  /// Twin-min value of the first l actions of `plan`, 1 <= l <= |plan|.
  double min_value(const Vector& state, const plan::Plan& plan, std::size_t l) const;

  /// target <- eta * live + (1 - eta) * target for both critics.
  void update_targets();

  PlanCritic& critic(int i) { return live_.at(static_cast<std::size_t>(i)); }
  const PlanCritic& critic(int i) const { return live_.at(static_cast<std::size_t>(i)); }
  const PlanCritic& target(int i) const { return target_.at(static_cast<std::size_t>(i)); }
  PlanCritic& target(int i) { return target_.at(static_cast<std::size_t>(i)); }
  std::vector<diff::ParamStore*> live_params();
  double eta() const { return eta_; }

 private:
  std::array<PlanCritic, 2> live_;
  std::array<PlanCritic, 2> target_;
  double eta_ = 0.005;
};

/// sum_k gamma^(k-1) r_k + gamma^l * bootstrap_value (the last term only when
/// `bootstrap`).
double plan_return(std::span<const double> rewards, double gamma, bool bootstrap, double bootstrap_value);

/// One detached target per batch item. The bootstrap value is the twin-min
/// target-critic value of a fresh full-length plan from the generator at the
/// plan-end state, less alpha times its first-step log-probability.
Vector td_target(const replay::SampledPlanBatch& batch, const plan::PlanGenerator& generator,
                 const CriticEnsemble& critics, double alpha, double gamma, Rng& rng);

/// Same, with the next-state plan noise supplied (B x A).
Vector td_target(const replay::SampledPlanBatch& batch, const plan::PlanGenerator& generator,
                 const CriticEnsemble& critics, double alpha, double gamma, const Matrix& noise);

/// Mean over the batch and both live critics of (Q(s, tau_l) - target)^2.
diff::Var critic_loss(diff::Tape& tape, const replay::SampledPlanBatch& batch, const Vector& targets,
                      CriticEnsemble& critics);

/// Squared-error loss for a single critic, used by the two-critic loss.
diff::Var single_critic_loss(diff::Tape& tape, const replay::SampledPlanBatch& batch, const Vector& targets,
                             const PlanCritic& critic);

}  // namespace planrl::value
