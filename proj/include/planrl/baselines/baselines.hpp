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

#include <random>
#include <string>
#include <vector>

#include "planrl/harness/agent.hpp"

namespace planrl::baselines {

using harness::EpisodeActor;
using harness::GpmLearner;
using harness::LearnerConfig;
using harness::TrainStats;

enum class BaselineKind { sac, far, ez };

BaselineKind parse_baseline(const std::string& name);
std::string to_string(BaselineKind kind);

struct BaselineOptions {
  BaselineKind kind = BaselineKind::sac;
  // FAR: every action is held for repeat_k steps.
  int repeat_k = 1;
  // EZ: durations follow zeta(ez_exponent) truncated to {1..ez_max_duration}.
  double ez_exponent = 2.0;
  int ez_max_duration = 1;

  void validate() const;
};

/// P(n) proportional to n^-exponent on {1..max_duration}.
class ZetaDuration {
 public:
  ZetaDuration(double exponent, int max_duration);
  int operator()(Rng& rng) { return dist_(rng) + 1; }
  /// Probability of each duration 1..max_duration.
  std::vector<double> probabilities() const { return dist_.probabilities(); }

 private:
  std::discrete_distribution<int> dist_;
};

/// Single-step soft actor-critic, optionally wrapped in an acting-time
/// repeat rule. Learning is the plan learner at L = 1 on single transitions;
/// FAR and EZ change only how actions are emitted.
class SacAgent : public harness::Agent {
 public:
  /// `config.plan_length` must be 1.
  SacAgent(const LearnerConfig& config, const BaselineOptions& options, Rng& init_rng);

  std::string name() const override { return to_string(options_.kind); }
  std::unique_ptr<EpisodeActor> make_actor(bool eval) override;
  TrainStats train_iteration(const replay::ReplayBuffer& buffer, Rng& rng) override;

  GpmLearner& learner() override { return learner_; }
  const GpmLearner& learner() const override { return learner_; }
  const BaselineOptions& options() const { return options_; }

 private:
  GpmLearner learner_;
  BaselineOptions options_;
};

}  // namespace planrl::baselines
