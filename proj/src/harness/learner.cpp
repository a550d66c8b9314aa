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

#include "planrl/harness/learner.hpp"

#include <cmath>

namespace planrl::harness {

using diff::Tape;
using diff::Var;

void LearnerConfig::validate() const {
  if (plan_length < 1) throw ConfigError("plan_length must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (eta < 0.0 || eta > 1.0) throw ConfigError("eta must lie in [0, 1]");
  if (!(alpha_init > 0.0)) throw ConfigError("alpha_init must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
}

namespace {

plan::GeneratorConfig actor_config(const LearnerConfig& c) {
  plan::GeneratorConfig g;
  g.obs_dim = c.obs_dim;
  g.bounds = c.bounds;
  g.plan_length = c.plan_length;
  g.hidden = c.actor_hidden;
  g.prior = c.prior;
  g.frame = c.frame;
  g.residual_scale = c.residual_scale;
  return g;
}

value::CriticConfig critic_config(const LearnerConfig& c) {
  value::CriticConfig v;
  v.obs_dim = c.obs_dim;
  v.bounds = c.bounds;
  v.hidden = c.critic_hidden;
  return v;
}

}  // namespace

GpmLearner::GpmLearner(const LearnerConfig& config, Rng& init_rng)
    : config_((config.validate(), config)),
      target_entropy_(config.target_entropy.value_or(-double(config.bounds.dim()))),
      actor_(actor_config(config), init_rng),
      critics_(critic_config(config), init_rng, config.eta),
      actor_opt_({.learning_rate = config.learning_rate}),
      critic_opt_({.learning_rate = config.learning_rate}),
      alpha_opt_({.learning_rate = config.learning_rate}) {
  log_alpha_ = alpha_params_.add("log_alpha", Matrix::Constant(1, 1, std::log(config.alpha_init)));
}

double GpmLearner::alpha() const { return std::exp(alpha_params_[log_alpha_].value(0, 0)); }

void GpmLearner::critic_step(const replay::SampledPlanBatch& batch, Rng& rng, TrainStats& stats) {
  const Vector targets = value::td_target(batch, actor_, critics_, alpha(), config_.gamma, rng);
  Tape tape;
  Var loss = value::critic_loss(tape, batch, targets, critics_);
  tape.backward(loss);
  critic_opt_.step(critics_.live_params());
  stats.critic_loss = loss.scalar();
  stats.mean_target = targets.mean();
}

void GpmLearner::actor_step(const Matrix& states, Rng& rng, TrainStats& stats) {
  const Matrix noise = actor_.draw_noise(states.rows(), rng);
  double mean_log_prob = 0.0;
  Tape tape;
  Var loss = actor_.actor_loss(tape, states, critics_, alpha(), noise, &mean_log_prob);
  tape.backward(loss);
  actor_opt_.step(actor_.params());
  stats.actor_loss = loss.scalar();
  stats.entropy = -mean_log_prob;
}

double GpmLearner::alpha_objective(double entropy) {
  // d/d log_alpha of -alpha (log pi + H) is -alpha (log pi + H).
  Tape tape;
  Var la = tape.param(alpha_params_, log_alpha_);
  Var loss = tape.exp(la) * (entropy - target_entropy_);
  tape.backward(loss);
  return loss.scalar();
}

void GpmLearner::alpha_step(TrainStats& stats) {
  alpha_objective(stats.entropy);
  alpha_opt_.step(alpha_params_);
  stats.alpha = alpha();
}

TrainStats GpmLearner::update(const replay::SampledPlanBatch& batch, Rng& rng) {
  TrainStats stats;
  critic_step(batch, rng, stats);
  actor_step(batch.states, rng, stats);
  alpha_step(stats);
  return stats;
}

}  // namespace planrl::harness
