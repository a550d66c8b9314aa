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

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "planrl/envs/env.hpp"
#include "planrl/harness/config.hpp"
#include "planrl/replay/buffer.hpp"

namespace planrl::harness {

struct EvalStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> returns;
};

/// Plan mode and greedy switching on fresh copies of `prototype`, seeded
/// from `seed`. Never mutates the agent.
EvalStats evaluate(Agent& agent, const env::Env& prototype, int episodes, std::uint64_t seed);

struct EvalRecord {
  long step = 0;
  long episodes = 0;
  double eval_mean = 0.0;
  double eval_std = 0.0;
  double train_return = 0.0;  // mean of the last 10 training episodes
  double alpha = 0.0;
  double epsilon = 0.0;
  double l_commit_ema = 0.0;
  double switch_rate = 0.0;
  double mean_commitment = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double entropy = 0.0;
};

struct TraceRecord {
  long step = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double l_commit_ema = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double entropy = 0.0;
  double switch_rate = 0.0;
};

struct RunResult {
  long steps = 0;
  long episodes = 0;
  std::vector<EvalRecord> evals;
  std::vector<TraceRecord> trace;
  std::optional<long> first_goal_step;  // first true terminal in training
  replan::CommitmentStats commitment;   // summed over training workers
  double min_epsilon = 0.0;             // over every training step
  std::vector<Vector> visitation;       // positions of the first visitation_steps steps
  bool stopped_early = false;
};

/// One learner and `actors` workers stepped in turn: each iteration steps
/// every worker once, then runs as many train iterations once warm.
class Trainer {
 public:
  explicit Trainer(const AgentConfig& config);

  /// With `out_dir`, writes the run artifacts there (see docs/formats.md).
  RunResult run(const std::optional<std::filesystem::path>& out_dir = std::nullopt);

  /// Acts, steps the worker's env and stores the transition. Returns it.
  replay::Transition rollout_step(int worker);
  TrainStats train_iteration();
  EvalStats evaluate_now(int episodes);

  Agent& agent() { return *agent_; }
  const replay::ReplayBuffer& buffer() const { return buffer_; }
  const env::Env& env(int worker) const { return *workers_.at(static_cast<std::size_t>(worker)).env; }
  const AgentConfig& config() const { return config_; }
  long steps() const { return steps_; }
  std::optional<long> first_goal_step() const { return first_goal_step_; }
  /// Positions after each of the first visitation_steps steps.
  const std::vector<Vector>& visitation() const { return visitation_; }
  replan::CommitmentStats commitment() const;

 private:
  struct Worker {
    std::unique_ptr<env::Env> env;
    std::unique_ptr<EpisodeActor> actor;
    Vector observation;
    std::uint64_t episode_id = 0;
    double episode_return = 0.0;
  };

  void start_episode(Worker& w);

  AgentConfig config_;
  std::unique_ptr<env::Env> prototype_;
  Rng init_rng_;
  Rng act_rng_;
  Rng train_rng_;
  Rng episode_seeds_;
  std::uint64_t eval_seed_;
  std::unique_ptr<Agent> agent_;
  replay::ReplayBuffer buffer_;
  std::vector<Worker> workers_;
  std::uint64_t next_episode_id_ = 0;
  long steps_ = 0;
  long episodes_ = 0;
  std::vector<double> recent_returns_;
  std::optional<long> first_goal_step_;
  std::vector<Vector> visitation_;
  std::unique_ptr<env::TrajectoryWriter> trajectory_;
};

/// Distinct bins of the first position coordinate hit by `positions`, with
/// `bins` equal cells over [lo, hi].
int count_position_bins(const std::vector<Vector>& positions, double lo, double hi, int bins);

/// Snapshot of all learner parameters (and the replanning state) to `dir`.
void save_agent(const Agent& agent, const std::filesystem::path& dir);
void load_agent(Agent& agent, const std::filesystem::path& dir);

}  // namespace planrl::harness
