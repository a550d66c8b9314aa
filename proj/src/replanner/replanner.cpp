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

#include "planrl/replanner/replanner.hpp"

#include <cmath>

namespace planrl::replan {

Mode parse_mode(const std::string& name) {
  if (name == "standard") return Mode::standard;
  if (name == "commit") return Mode::commit;
  if (name == "mpc") return Mode::mpc;
  throw ConfigError("mode must be one of standard|commit|mpc, got '" + name + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::standard: return "standard";
    case Mode::commit: return "commit";
    case Mode::mpc: return "mpc";
  }
  return "standard";
}

const Vector& omega(const Plan& plan) {
  if (plan.empty()) throw UsageError("omega of an empty plan");
  return plan.actions.front();
}

Plan rho(const Plan& plan) {
  Plan out{{}, plan.frame};
  if (plan.size() > 1) out.actions.assign(plan.actions.begin() + 1, plan.actions.end());
  return out;
}

Plan to_world(const Plan& ego, const Vector& origin) {
  Plan out = ego;
  for (Vector& a : out.actions) a += origin;
  return out;
}

Plan to_ego(const Plan& world, const Vector& origin) {
  Plan out = world;
  for (Vector& a : out.actions) a -= origin;
  return out;
}

Plan rho(const Plan& plan, const Vector& old_origin, const Vector& new_origin) {
  if (plan.frame != Frame::ego_setpoint) return rho(plan);
  return to_ego(rho(to_world(plan, old_origin)), new_origin);
}

SwitchState SwitchState::for_plan_length(int L, Mode mode) {
  SwitchState s;
  s.l_commit_target = 0.5 * L;
  s.l_commit_ema = s.l_commit_target;
  s.mode = mode;
  return s;
}

double switch_probability(double gap, double epsilon, double kappa) {
  // softmax([eps, gap] / kappa)[1]
  return 1.0 / (1.0 + std::exp((epsilon - gap) / kappa));
}

void record_commitment(SwitchState& s, int segment_length) {
  if (segment_length < 1) throw UsageError("commitment segments have at least one step");
  s.l_commit_ema = s.ema_coeff * s.l_commit_ema + (1.0 - s.ema_coeff) * segment_length;
}

void update_epsilon(SwitchState& s, double learning_rate) {
  s.epsilon = std::max(0.0, s.epsilon - learning_rate * (s.l_commit_ema - s.l_commit_target));
}

SwitchDecision decide_switch(const Vector& state, const Plan& old_plan, const Plan& new_plan,
                             const PrefixValue& value, const SwitchState& s, Rng& rng, bool greedy) {
  SwitchDecision d;
  if (old_plan.empty() || s.mode == Mode::mpc) {
    d.switched = true;
    return d;
  }
  if (s.mode == Mode::commit) {
    d.switched = false;
    d.probability = 0.0;
    return d;
  }
  const std::size_t l = old_plan.size();
  if (new_plan.size() < l) throw UsageError("new plan is shorter than the remaining old plan");
  d.gap = value(state, new_plan, l) - value(state, old_plan, l);
  if (!std::isfinite(d.gap)) throw NumericError("non-finite plan value gap");
  d.probability = switch_probability(d.gap, s.epsilon, s.kappa);
  if (greedy) {
    d.switched = d.gap > s.epsilon;
  } else {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    d.switched = u(rng) < d.probability;
  }
  return d;
}

Vector Replanner::act(const Vector& state, Plan new_plan, const PrefixValue& value, Rng& rng, bool greedy,
                      bool record) {
  if (new_plan.empty()) throw UsageError("new plan is empty");
  const bool fresh_episode = cursor_.remaining.empty() && cursor_.steps_committed == 0;
  if (!cursor_.remaining.empty()) ++stats_.decisions;
  last_ = decide_switch(state, cursor_.remaining, new_plan, value, state_, rng, greedy);
  if (last_.switched) {
    if (cursor_.steps_committed > 0) {
      ++stats_.completed;
      stats_.completed_steps += static_cast<std::uint64_t>(cursor_.steps_committed);
      if (record) record_commitment(state_, cursor_.steps_committed);
    }
    if (!fresh_episode) ++stats_.switches;
    cursor_.steps_committed = 0;
    current_ = std::move(new_plan);
  } else {
    current_ = cursor_.remaining;
  }
  ++cursor_.steps_committed;
  return omega(current_);
}

void Replanner::advance(const Vector& old_origin, const Vector& new_origin) {
  cursor_.remaining = current_.frame == Frame::ego_setpoint ? rho(current_, old_origin, new_origin) : rho(current_);
}

void Replanner::end_episode(bool record) {
  if (cursor_.steps_committed > 0) {
    ++stats_.truncated;
    stats_.truncated_steps += static_cast<std::uint64_t>(cursor_.steps_committed);
    if (record) record_commitment(state_, cursor_.steps_committed);
  }
  cursor_ = {};
  current_ = {};
}

}  // namespace planrl::replan
