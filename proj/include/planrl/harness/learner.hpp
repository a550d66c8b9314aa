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

#include <optional>

#include "planrl/diffcore/adam.hpp"
#include "planrl/planvalue/critic.hpp"

namespace planrl::harness {

struct LearnerConfig {
  int obs_dim = 0;
  ActionBounds bounds;
  Frame frame = Frame::raw;
  int plan_length = 1;
  std::vector<int> actor_hidden = {100, 100};
  std::vector<int> critic_hidden = {100, 100};
  plan::DecoderPrior prior = plan::DecoderPrior::repeat;
  double residual_scale = 0.1;
  double learning_rate = 5e-4;
  double gamma = 0.99;
  double eta = 0.005;
  // Defaults to -(action width).
  std::optional<double> target_entropy;
  double alpha_init = 1.0;
  int batch_size = 64;

  void validate() const;
};

struct TrainStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double alpha = 0.0;
  // -mean log pi_0 over the actor batch (a single-sample entropy estimate).
  double entropy = 0.0;
  double mean_target = 0.0;
  // Replanning state after the iteration (GPM only).
  double epsilon = 0.0;
  double l_commit_ema = 0.0;
};

/// Plan generator, twin plan critics and temperature with their optimizers.
/// One train step is critic, actor, temperature, then (after the caller's
/// threshold update) the soft target copy.
class GpmLearner {
 public:
  GpmLearner(const LearnerConfig& config, Rng& init_rng);

  void critic_step(const replay::SampledPlanBatch& batch, Rng& rng, TrainStats& stats);
  void actor_step(const Matrix& states, Rng& rng, TrainStats& stats);
  /// J(alpha) = mean(-alpha (log pi + target)); needs stats.entropy from the
  /// actor step.
  void alpha_step(TrainStats& stats);
  /// J(alpha) at the current temperature for a measured entropy. Its
  /// gradient is added to alpha_params().
  double alpha_objective(double entropy);
  void soft_update() { critics_.update_targets(); }

  /// Critic, actor and temperature steps on one batch.
  TrainStats update(const replay::SampledPlanBatch& batch, Rng& rng);

  double alpha() const;
  double target_entropy() const { return target_entropy_; }
  const LearnerConfig& config() const { return config_; }
  plan::PlanGenerator& actor() { return actor_; }
  const plan::PlanGenerator& actor() const { return actor_; }
  value::CriticEnsemble& critics() { return critics_; }
  const value::CriticEnsemble& critics() const { return critics_; }
  diff::ParamStore& alpha_params() { return alpha_params_; }
  const diff::ParamStore& alpha_params() const { return alpha_params_; }

  /// Twin-min prefix value used by the replanning signal.
  double min_value(const Vector& state, const plan::Plan& plan, std::size_t l) const {
    return critics_.min_value(state, plan, l);
  }

 private:
  LearnerConfig config_;
  double target_entropy_;
  plan::PlanGenerator actor_;
  value::CriticEnsemble critics_;
  diff::ParamStore alpha_params_;
  diff::ParamId log_alpha_ = 0;
  diff::Adam actor_opt_;
  diff::Adam critic_opt_;
  diff::Adam alpha_opt_;
};

}  // namespace planrl::harness
