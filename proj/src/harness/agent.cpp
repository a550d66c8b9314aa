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

#include "planrl/harness/agent.hpp"

namespace planrl::harness {

namespace {

// Workers share the agent's switch state: it is loaded before each decision
// and written back after any change from training actors.
class GpmActor : public EpisodeActor {
 public:
  GpmActor(const GpmLearner& learner, replan::SwitchState& shared, bool eval)
      : learner_(learner), shared_(shared), eval_(eval), replanner_(shared) {
    value_ = [this](const Vector& s, const plan::Plan& p, std::size_t l) { return learner_.min_value(s, p, l); };
  }

  Vector act(const Vector& observation, Rng& rng) override {
    replanner_.switch_state() = shared_;
    if (eval_) {
      return replanner_.act(observation, learner_.actor().mode_plan(observation), value_, rng, true, false);
    }
    plan::Plan fresh = learner_.actor().sample_plan(observation, rng).plan;
    Vector a = replanner_.act(observation, std::move(fresh), value_, rng, false, true);
    shared_ = replanner_.switch_state();
    return a;
  }

  void advance(const Vector& old_position, const Vector& new_position) override {
    replanner_.advance(old_position, new_position);
  }

  void end_episode() override {
    replanner_.switch_state() = shared_;
    replanner_.end_episode(!eval_);
    if (!eval_) shared_ = replanner_.switch_state();
  }

  const replan::CommitmentStats* commitment() const override { return &replanner_.stats(); }

 private:
  const GpmLearner& learner_;
  replan::SwitchState& shared_;
  bool eval_;
  replan::Replanner replanner_;
  replan::PrefixValue value_;
};

}  // namespace

GpmAgent::GpmAgent(const LearnerConfig& config, const GpmOptions& options, Rng& init_rng)
    : learner_(config, init_rng), options_(options), switch_state_(options.switch_state) {
  if (options.epsilon_learning_rate < 0.0) throw ConfigError("epsilon learning rate must be non-negative");
  if (!(options.switch_state.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (options.switch_state.epsilon < 0.0) throw ConfigError("initial epsilon must be non-negative");
}

std::unique_ptr<EpisodeActor> GpmAgent::make_actor(bool eval) {
  return std::make_unique<GpmActor>(learner_, switch_state_, eval);
}

TrainStats GpmAgent::train_iteration(const replay::ReplayBuffer& buffer, Rng& rng) {
  const replay::SampledPlanBatch batch =
      buffer.sample_plan_batch(learner_.config().batch_size, learner_.config().plan_length, rng);
  TrainStats stats = learner_.update(batch, rng);
  if (switch_state_.mode == replan::Mode::standard) {
    replan::update_epsilon(switch_state_, options_.epsilon_learning_rate);
  }
  learner_.soft_update();
  stats.epsilon = switch_state_.epsilon;
  stats.l_commit_ema = switch_state_.l_commit_ema;
  return stats;
}

}  // namespace planrl::harness
