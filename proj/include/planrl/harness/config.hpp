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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "planrl/harness/agent.hpp"

namespace planrl::harness {

/// Everything that defines a run. Text form is one `key = value` per line,
/// `#` starts a comment; see docs/config.md for the keys.
struct AgentConfig {
  std::string task = "pendulum";
  std::string agent = "gpm";  // gpm | sac | far | ez
  replan::Mode mode = replan::Mode::standard;
  std::uint64_t seed = 0;
  long total_steps = 30000;
  long warmup_steps = 1000;
  int actors = 1;

  std::vector<int> hidden = {100, 100};
  double learning_rate = 5e-4;
  int batch_size = 64;
  int plan_length = 3;
  double gamma = 0.99;
  double eta = 0.005;
  std::optional<double> target_entropy;  // default -(action width)
  double alpha_init = 1.0;
  plan::DecoderPrior prior = plan::DecoderPrior::repeat;
  double residual_scale = 0.1;

  std::optional<double> l_commit_target;  // default 0.5 L
  double kappa = 1.0;
  double ema_coeff = 0.95;
  double epsilon_init = 1.0;
  std::optional<double> epsilon_learning_rate;  // default learning_rate

  std::optional<int> repeat_k;         // FAR, default L
  double ez_exponent = 2.0;
  std::optional<int> ez_max_duration;  // EZ, default L

  long eval_every = 5000;
  int eval_episodes = 5;
  long trace_every = 100;
  long visitation_steps = 5000;
  std::size_t capacity = 1'000'000;

  std::optional<double> stop_at_return;
  bool stop_on_goal = false;
  bool write_trajectory = true;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// Sets one field from text. Throws ConfigError("field 'key': ...").
  void set(const std::string& key, const std::string& value);

  /// All fields in `key = value` form, in a fixed order. Optional fields that
  /// are unset are written as `auto`.
  std::string to_text() const;

  static AgentConfig parse(const std::string& text);
  static AgentConfig load(const std::filesystem::path& path);
  /// `overrides` as (key, value) pairs applied after the file.
  static AgentConfig from_sources(const std::optional<std::filesystem::path>& file,
                                  const std::vector<std::pair<std::string, std::string>>& overrides);

  static std::vector<std::string> keys();

  double resolved_l_commit_target() const { return l_commit_target.value_or(0.5 * plan_length); }
  double resolved_epsilon_learning_rate() const { return epsilon_learning_rate.value_or(learning_rate); }
};

/// Learner settings for a task: the run config plus the environment's
/// observation width, bounds and frame. Baselines always learn at L = 1.
LearnerConfig learner_config(const AgentConfig& config, int obs_dim, const ActionBounds& bounds, Frame frame);

/// Builds the configured agent (initialized from `init_rng`).
std::unique_ptr<Agent> make_agent(const AgentConfig& config, int obs_dim, const ActionBounds& bounds, Frame frame,
                                  Rng& init_rng);

}  // namespace planrl::harness
