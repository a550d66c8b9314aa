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

#include "planrl/planvalue/critic.hpp"

#include <cmath>
#include <string>

namespace planrl::value {

using diff::Tape;
using diff::Var;

void CriticConfig::validate() const {
  if (obs_dim <= 0) throw ConfigError("critic: observation width must be positive");
  if (bounds.dim() <= 0 || bounds.low.size() != bounds.high.size()) {
    throw ConfigError("critic: action bounds are malformed");
  }
  if (!(bounds.high.array() > bounds.low.array()).all()) throw ConfigError("critic: action bounds need low < high");
  if (hidden.empty()) throw ConfigError("critic: needs at least one hidden width");
  for (int w : hidden) {
    if (w <= 0) throw ConfigError("critic: hidden widths must be positive");
  }
}

PlanCritic::PlanCritic(CriticConfig config, Rng& init_rng) : config_(std::move(config)) {
  config_.validate();
  const int A = config_.bounds.dim();
  const int K = config_.hidden.front();
  const int H = config_.hidden.back();
  std::vector<int> decoder_widths(config_.hidden.begin() + 1, config_.hidden.end());
  decoder_widths.push_back(1);

  encoder_ = diff::Linear(params_, "encoder", config_.obs_dim, K, init_rng);
  first_decoder_ = diff::Mlp(params_, "first_decoder", {K + A, decoder_widths}, init_rng);
  init_head_ = diff::Linear(params_, "lstm_init", K, H, init_rng);
  lstm_ = diff::RecurrentCell(params_, "value_lstm", {diff::CellKind::lstm, A, H}, init_rng);
  step_decoder_ = diff::Mlp(params_, "step_decoder", {H, decoder_widths}, init_rng);

  center_ = config_.bounds.center().transpose();
  inv_half_range_ = config_.bounds.half_range().cwiseInverse().transpose();
}

Var PlanCritic::value_sequence(Tape& tape, Var states, std::span<const Var> actions, bool trainable) const {
  if (actions.empty()) throw UsageError("plan value of an empty plan");
  if (states.cols() != config_.obs_dim) {
    throw ConfigError("critic expects observation width " + std::to_string(config_.obs_dim) + ", got " +
                      std::to_string(states.cols()));
  }
  const Var center = tape.constant(center_);
  const Var scale = tape.constant(inv_half_range_);
  std::vector<Var> normalized;
  normalized.reserve(actions.size());
  for (const Var& a : actions) {
    if (a.cols() != config_.bounds.dim() || a.rows() != states.rows()) {
      throw ConfigError("critic: plan action has the wrong shape");
    }
    normalized.push_back((a - center) * scale);
  }

  Var z = tape.relu(encoder_.forward(tape, params_, states, trainable));
  std::vector<Var> columns;
  columns.reserve(actions.size());
  columns.push_back(first_decoder_.forward(tape, params_, tape.concat_cols(std::vector<Var>{z, normalized[0]}),
                                           trainable));
  if (actions.size() > 1) {
    diff::RecurrentState state = lstm_.state_from(tape, tape.tanh(init_head_.forward(tape, params_, z, trainable)));
    for (std::size_t k = 1; k < actions.size(); ++k) {
      // The step-k increment sees a0..a_k; the first LSTM step absorbs a0.
      if (k == 1) state = lstm_.step(tape, params_, state, normalized[0], trainable).first;
      auto [next, out] = lstm_.step(tape, params_, state, normalized[k], trainable);
      state = next;
      columns.push_back(columns.back() + step_decoder_.forward(tape, params_, out, trainable));
    }
  }
  return tape.concat_cols(columns);
}

ValueSequence PlanCritic::value_sequence(const Vector& state, const plan::Plan& plan) const {
  if (plan.empty()) throw UsageError("plan value of an empty plan");
  Tape tape(false);
  std::vector<Var> actions;
  for (const Vector& a : plan.actions) actions.push_back(tape.constant(a.transpose()));
  const Matrix v = value_sequence(tape, tape.constant(state.transpose()), actions, false).value();
  ValueSequence out(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    if (!std::isfinite(v(0, k))) throw NumericError("non-finite plan value");
    out[static_cast<std::size_t>(k)] = v(0, k);
  }
  return out;
}

CriticEnsemble::CriticEnsemble(const CriticConfig& config, Rng& init_rng, double eta) : eta_(eta) {
  if (eta < 0.0 || eta > 1.0) throw ConfigError("soft-update rate must lie in [0, 1]");
  live_[0] = PlanCritic(config, init_rng);
  live_[1] = PlanCritic(config, init_rng);
  target_ = live_;
}

Var CriticEnsemble::min_values(Tape& tape, Var states, std::span<const Var> actions, bool trainable) const {
  return tape.min(live_[0].value_sequence(tape, states, actions, trainable),
                  live_[1].value_sequence(tape, states, actions, trainable));
}

Var CriticEnsemble::target_min_values(Tape& tape, Var states, std::span<const Var> actions) const {
  return tape.min(target_[0].value_sequence(tape, states, actions, false),
                  target_[1].value_sequence(tape, states, actions, false));
}

double CriticEnsemble::min_value(const Vector& state, const plan::Plan& plan, std::size_t l) const {
  if (l < 1 || l > plan.size()) throw UsageError("prefix length out of range");
  const plan::Plan prefix = plan.prefix(l);
  const double q1 = live_[0].value_sequence(state, prefix).back();
  const double q2 = live_[1].value_sequence(state, prefix).back();
  return std::min(q1, q2);
}

void CriticEnsemble::update_targets() {
  for (std::size_t i = 0; i < live_.size(); ++i) diff::soft_update(target_[i].params(), live_[i].params(), eta_);
}

std::vector<diff::ParamStore*> CriticEnsemble::live_params() { return {&live_[0].params(), &live_[1].params()}; }

double plan_return(std::span<const double> rewards, double gamma, bool bootstrap, double bootstrap_value) {
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  if (bootstrap) total += discount * bootstrap_value;
  return total;
}

Vector td_target(const replay::SampledPlanBatch& batch, const plan::PlanGenerator& generator,
                 const CriticEnsemble& critics, double alpha, double gamma, Rng& rng) {
  return td_target(batch, generator, critics, alpha, gamma, generator.draw_noise(batch.size(), rng));
}

Vector td_target(const replay::SampledPlanBatch& batch, const plan::PlanGenerator& generator,
                 const CriticEnsemble& critics, double alpha, double gamma, const Matrix& noise) {
  const int B = batch.size();
  if (batch.rewards.rows() != B || batch.rewards.cols() < batch.max_length() ||
      static_cast<int>(batch.bootstrap.size()) != B || batch.next_states.rows() != B) {
    throw UsageError("plan batch rewards do not match its lengths");
  }
  Tape tape(false);
  Var next = tape.constant(batch.next_states);
  const plan::PlanGenerator::Rollout fresh = generator.rollout(tape, next, noise, false);
  const Matrix q = critics.target_min_values(tape, next, fresh.actions).value();
  const Matrix& log_prob = fresh.log_prob.value();

  Vector targets(B);
  std::vector<double> rewards;
  for (int i = 0; i < B; ++i) {
    const int l = batch.lengths[static_cast<std::size_t>(i)];
    if (l < 1 || l > batch.rewards.cols()) throw UsageError("plan length outside the reward row");
    rewards.assign(static_cast<std::size_t>(l), 0.0);
    for (int k = 0; k < l; ++k) rewards[static_cast<std::size_t>(k)] = batch.rewards(i, k);
    const double soft_value = q(i, q.cols() - 1) - alpha * log_prob(i, 0);
    targets(i) = plan_return(rewards, gamma, batch.bootstrap[static_cast<std::size_t>(i)] != 0, soft_value);
  }
  if (!targets.allFinite()) throw NumericError("non-finite TD target");
  return targets;
}

Var single_critic_loss(Tape& tape, const replay::SampledPlanBatch& batch, const Vector& targets,
                       const PlanCritic& critic) {
  const int B = batch.size();
  if (targets.size() != B) throw UsageError("critic loss needs one target per batch item");
  std::vector<Var> actions;
  actions.reserve(batch.actions.size());
  for (const Matrix& a : batch.actions) actions.push_back(tape.constant(a));
  std::vector<int> columns(static_cast<std::size_t>(B));
  for (int i = 0; i < B; ++i) columns[static_cast<std::size_t>(i)] = batch.lengths[static_cast<std::size_t>(i)] - 1;
  Var q = tape.pick(critic.value_sequence(tape, tape.constant(batch.states), actions, true), columns);
  return tape.mean(tape.square(q - tape.constant(targets)));
}

Var critic_loss(Tape& tape, const replay::SampledPlanBatch& batch, const Vector& targets, CriticEnsemble& critics) {
  Var loss = (single_critic_loss(tape, batch, targets, critics.critic(0)) +
              single_critic_loss(tape, batch, targets, critics.critic(1))) *
             0.5;
  if (!std::isfinite(loss.scalar())) throw NumericError("non-finite critic loss");
  return loss;
}

}  // namespace planrl::value
