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

#include "planrl/baselines/baselines.hpp"

#include <cmath>

namespace planrl::baselines {

BaselineKind parse_baseline(const std::string& name) {
  if (name == "sac") return BaselineKind::sac;
  if (name == "far") return BaselineKind::far;
  if (name == "ez") return BaselineKind::ez;
  throw ConfigError("unknown baseline '" + name + "' (sac|far|ez)");
}

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::sac: return "sac";
    case BaselineKind::far: return "far";
    case BaselineKind::ez: return "ez";
  }
  return "sac";
}

void BaselineOptions::validate() const {
  if (repeat_k < 1) throw ConfigError("repeat_k must be >= 1");
  if (ez_max_duration < 1) throw ConfigError("ez_max_duration must be >= 1");
  if (!(ez_exponent > 0.0)) throw ConfigError("ez_exponent must be positive");
}

namespace {

std::vector<double> zeta_weights(double exponent, int max_duration) {
  if (max_duration < 1) throw ConfigError("max duration must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(max_duration));
  for (int n = 1; n <= max_duration; ++n) w[static_cast<std::size_t>(n - 1)] = std::pow(double(n), -exponent);
  return w;
}

Vector policy_action(const GpmLearner& learner, const Vector& observation, Rng& rng, bool eval) {
  if (eval) return learner.actor().mode_plan(observation)[0];
  return learner.actor().sample_plan(observation, rng).plan[0];
}

class SacActor : public EpisodeActor {
 public:
  SacActor(const GpmLearner& learner, bool eval) : learner_(learner), eval_(eval) {}
  Vector act(const Vector& observation, Rng& rng) override {
    return policy_action(learner_, observation, rng, eval_);
  }

 private:
  const GpmLearner& learner_;
  bool eval_;
};

// Holds each fresh action for k steps; the cache is cleared between episodes.
class RepeatActor : public EpisodeActor {
 public:
  RepeatActor(const GpmLearner& learner, int k, bool eval) : learner_(learner), k_(k), eval_(eval) {}
  Vector act(const Vector& observation, Rng& rng) override {
    if (left_ == 0) {
      cached_ = policy_action(learner_, observation, rng, eval_);
      left_ = k_;
    }
    --left_;
    return cached_;
  }
  void end_episode() override { left_ = 0; }

 private:
  const GpmLearner& learner_;
  int k_;
  bool eval_;
  int left_ = 0;
  Vector cached_;
};

class EzActor : public EpisodeActor {
 public:
  EzActor(const GpmLearner& learner, const BaselineOptions& o)
      : learner_(learner), duration_(o.ez_exponent, o.ez_max_duration) {}
  Vector act(const Vector& observation, Rng& rng) override {
    if (left_ == 0) {
      cached_ = policy_action(learner_, observation, rng, false);
      left_ = duration_(rng);
    }
    --left_;
    return cached_;
  }
  void end_episode() override { left_ = 0; }

 private:
  const GpmLearner& learner_;
  ZetaDuration duration_;
  int left_ = 0;
  Vector cached_;
};

const LearnerConfig& single_step(const LearnerConfig& config) {
  if (config.plan_length != 1) throw ConfigError("baselines act on single-step plans (L = 1)");
  return config;
}

}  // namespace

ZetaDuration::ZetaDuration(double exponent, int max_duration) {
  const std::vector<double> w = zeta_weights(exponent, max_duration);
  dist_ = std::discrete_distribution<int>(w.begin(), w.end());
}

SacAgent::SacAgent(const LearnerConfig& config, const BaselineOptions& options, Rng& init_rng)
    : learner_(single_step(config), init_rng),
      options_(options) {
  options.validate();
}

std::unique_ptr<EpisodeActor> SacAgent::make_actor(bool eval) {
  switch (options_.kind) {
    case BaselineKind::far: return std::make_unique<RepeatActor>(learner_, options_.repeat_k, eval);
    case BaselineKind::ez:
      if (eval) return std::make_unique<SacActor>(learner_, true);
      return std::make_unique<EzActor>(learner_, options_);
    case BaselineKind::sac: break;
  }
  return std::make_unique<SacActor>(learner_, eval);
}

TrainStats SacAgent::train_iteration(const replay::ReplayBuffer& buffer, Rng& rng) {
  const replay::SampledPlanBatch batch = buffer.sample_transitions(learner_.config().batch_size, rng);
  TrainStats stats = learner_.update(batch, rng);
  learner_.soft_update();
  return stats;
}

}  // namespace planrl::baselines
