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
#include <functional>
#include <string>

#include "planrl/plangen/plan.hpp"

namespace planrl::replan {

using plan::Plan;

enum class Mode { standard, commit, mpc };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

/// Current-step action of a plan.
const Vector& omega(const Plan& plan);

/// Time-forward a raw-action plan: drop the first action. Empty stays empty.
Plan rho(const Plan& plan);

/// Time-forward an ego-setpoint plan. Setpoints are moved to the world frame
/// at `old_origin`, the first is dropped, and the rest are re-expressed at
/// `new_origin`. Raw plans ignore the origins.
Plan rho(const Plan& plan, const Vector& old_origin, const Vector& new_origin);

Plan to_world(const Plan& ego, const Vector& origin);
Plan to_ego(const Plan& world, const Vector& origin);

struct SwitchState {
  double epsilon = 1.0;
  double l_commit_ema = 0.0;
  double l_commit_target = 0.0;
  double ema_coeff = 0.95;
  double kappa = 1.0;
  Mode mode = Mode::standard;

  // Target 0.5 L. The ema starts at the target so eps is not pushed before
  // any commitment has been observed.
  static SwitchState for_plan_length(int L, Mode mode = Mode::standard);
};

/// P(m = 1) for the two-way categorical over logits [eps, gap] / kappa.
double switch_probability(double gap, double epsilon, double kappa);

/// ema <- c * ema + (1 - c) * segment_length.
void record_commitment(SwitchState& s, int segment_length);

/// eps <- max(0, eps - lr * (ema - target)).
void update_epsilon(SwitchState& s, double learning_rate);

/// Twin-min value of the first l actions of a plan at a state.
using PrefixValue = std::function<double(const Vector& state, const Plan& plan, std::size_t l)>;

struct SwitchDecision {
  bool switched = false;
  double probability = 1.0;  // of switching
  double gap = 0.0;          // Q_l(s, new) - Q_l(s, old), 0 when not evaluated
};

/// Replanning signal m. `greedy` takes the categorical mode (switch iff the
/// value gap exceeds eps) instead of sampling.
SwitchDecision decide_switch(const Vector& state, const Plan& old_plan, const Plan& new_plan,
                             const PrefixValue& value, const SwitchState& s, Rng& rng, bool greedy = false);

struct PlanCursor {
  Plan remaining;
  int steps_committed = 0;
};

struct CommitmentStats {
  std::uint64_t switches = 0;      // switch events after the first step of an episode
  std::uint64_t decisions = 0;     // steps where a switch could have been declined
  std::uint64_t completed = 0;     // segments ended by a switch
  std::uint64_t completed_steps = 0;
  std::uint64_t truncated = 0;     // segments ended by the episode
  std::uint64_t truncated_steps = 0;

  double mean_completed() const { return completed ? double(completed_steps) / double(completed) : 0.0; }
  double mean_all() const {
    const auto n = completed + truncated;
    return n ? double(completed_steps + truncated_steps) / double(n) : 0.0;
  }
};

/// Per-worker rollout controller over one episode stream.
///
///   a = act(s, new_plan, ...)      decide, adopt, emit omega
///   env.step(a)
///   advance(old_origin, new_origin)
///   ...
///   end_episode()
class Replanner {
 public:
  explicit Replanner(SwitchState state = {}) : state_(state) {}

  /// `record` controls whether segment lengths feed the ema (off for
  /// evaluation).
  Vector act(const Vector& state, Plan new_plan, const PrefixValue& value, Rng& rng, bool greedy = false,
             bool record = true);
  void advance(const Vector& old_origin = {}, const Vector& new_origin = {});
  void end_episode(bool record = true);

  const PlanCursor& cursor() const { return cursor_; }
  const Plan& current() const { return current_; }
  SwitchState& switch_state() { return state_; }
  const SwitchState& switch_state() const { return state_; }
  const CommitmentStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }
  const SwitchDecision& last_decision() const { return last_; }

 private:
  SwitchState state_;
  PlanCursor cursor_;
  Plan current_;
  CommitmentStats stats_;
  SwitchDecision last_;
};

}  // namespace planrl::replan
