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

#include <memory>
#include <string>

#include "planrl/harness/learner.hpp"
#include "planrl/replanner/replanner.hpp"

namespace planrl::harness {

/// Acting state of one worker over an episode stream.
///
///   a = act(obs)            action in the task frame
///   env.step(a)
///   advance(old, new)       positions before and after the step
///   ...
///   end_episode()
class EpisodeActor {
 public:
  virtual ~EpisodeActor() = default;
  virtual Vector act(const Vector& observation, Rng& rng) = 0;
  virtual void advance(const Vector& /*old_position*/, const Vector& /*new_position*/) {}
  virtual void end_episode() {}
  /// Plan segment statistics; null for agents that do not replan.
  virtual const replan::CommitmentStats* commitment() const { return nullptr; }
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;

  /// Evaluation actors act on the policy mode and never mutate the agent.
  virtual std::unique_ptr<EpisodeActor> make_actor(bool eval) = 0;

  /// One learner iteration on `buffer`.
  virtual TrainStats train_iteration(const replay::ReplayBuffer& buffer, Rng& rng) = 0;

  virtual GpmLearner& learner() = 0;
  virtual const GpmLearner& learner() const = 0;

  /// Shared replanning state; null for agents that do not replan.
  virtual const replan::SwitchState* switch_state() const { return nullptr; }
};

struct GpmOptions {
  replan::SwitchState switch_state;
  // Step size of the threshold update.
  double epsilon_learning_rate = 5e-4;
};

/// Plan generator and critics acting through the replanner.
class GpmAgent : public Agent {
 public:
  GpmAgent(const LearnerConfig& config, const GpmOptions& options, Rng& init_rng);

  std::string name() const override { return "gpm"; }
  std::unique_ptr<EpisodeActor> make_actor(bool eval) override;
  /// Critic, actor, temperature, threshold, soft copy.
  TrainStats train_iteration(const replay::ReplayBuffer& buffer, Rng& rng) override;

  GpmLearner& learner() override { return learner_; }
  const GpmLearner& learner() const override { return learner_; }
  const replan::SwitchState* switch_state() const override { return &switch_state_; }
  replan::SwitchState& mutable_switch_state() { return switch_state_; }
  const GpmOptions& options() const { return options_; }

 private:
  GpmLearner learner_;
  GpmOptions options_;
  replan::SwitchState switch_state_;
};

}  // namespace planrl::harness
