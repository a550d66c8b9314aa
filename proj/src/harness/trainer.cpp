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

#include "planrl/harness/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "planrl/harness/plots.hpp"

namespace planrl::harness {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kRecentEpisodes = 10;

const char* const kMetricsHeader =
    "step,episodes,eval_mean,eval_std,train_return,alpha,epsilon,l_commit_ema,switch_rate,mean_commitment,"
    "critic_loss,actor_loss,entropy\n";
const char* const kTraceHeader = "step,alpha,epsilon,l_commit_ema,critic_loss,actor_loss,entropy,switch_rate\n";

std::string metrics_row(const EvalRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.step, r.episodes, r.eval_mean, r.eval_std,
                     r.train_return, r.alpha, r.epsilon, r.l_commit_ema, r.switch_rate, r.mean_commitment,
                     r.critic_loss, r.actor_loss, r.entropy);
}

std::string trace_row(const TraceRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{}\n", r.step, r.alpha, r.epsilon, r.l_commit_ema, r.critic_loss,
                     r.actor_loss, r.entropy, r.switch_rate);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

double switch_rate(const replan::CommitmentStats& s) {
  return s.decisions ? double(s.switches) / double(s.decisions) : 0.0;
}

}  // namespace

EvalStats evaluate(Agent& agent, const env::Env& prototype, int episodes, std::uint64_t seed) {
  EvalStats out;
  Rng seeds(seed);
  for (int ep = 0; ep < episodes; ++ep) {
    std::unique_ptr<env::Env> e = prototype.clone();
    Vector obs = e->reset(seeds());
    Rng rng(seeds());
    std::unique_ptr<EpisodeActor> actor = agent.make_actor(true);
    double ret = 0.0;
    for (;;) {
      const Vector a = actor->act(obs, rng);
      const Vector origin = e->position();
      const env::StepResult r = e->step(a);
      actor->advance(origin, r.position);
      ret += r.reward;
      obs = r.observation;
      if (r.done()) break;
    }
    actor->end_episode();
    out.returns.push_back(ret);
  }
  if (!out.returns.empty()) {
    const double n = double(out.returns.size());
    for (double r : out.returns) out.mean += r / n;
    double var = 0.0;
    for (double r : out.returns) var += (r - out.mean) * (r - out.mean) / n;
    out.stddev = std::sqrt(var);
  }
  return out;
}

int count_position_bins(const std::vector<Vector>& positions, double lo, double hi, int bins) {
  if (!(hi > lo) || bins < 1) throw UsageError("bad bin layout");
  std::set<int> hit;
  for (const Vector& p : positions) {
    hit.insert(std::clamp(int(std::floor((p(0) - lo) / (hi - lo) * bins)), 0, bins - 1));
  }
  return static_cast<int>(hit.size());
}

Trainer::Trainer(const AgentConfig& config)
    : config_((config.validate(), config)),
      prototype_(env::make_env(config.task)),
      buffer_(config.capacity, prototype_->spec().frame) {
  Rng master(config.seed);
  init_rng_.seed(master());
  act_rng_.seed(master());
  train_rng_.seed(master());
  episode_seeds_.seed(master());
  eval_seed_ = master();
  const env::EnvSpec& spec = prototype_->spec();
  agent_ = make_agent(config_, spec.obs_dim, spec.bounds, spec.frame, init_rng_);
  workers_.resize(static_cast<std::size_t>(config_.actors));
  for (Worker& w : workers_) {
    w.env = prototype_->clone();
    w.actor = agent_->make_actor(false);
    start_episode(w);
  }
}

void Trainer::start_episode(Worker& w) {
  w.observation = w.env->reset(episode_seeds_());
  w.episode_id = next_episode_id_++;
  w.episode_return = 0.0;
}

replay::Transition Trainer::rollout_step(int worker) {
  Worker& w = workers_.at(static_cast<std::size_t>(worker));
  const env::EnvSpec& spec = w.env->spec();
  const Vector action = spec.bounds.clamp(w.actor->act(w.observation, act_rng_));
  const Vector origin = w.env->position();
  const int step_index = w.env->steps();
  env::StepResult r;
  try {
    r = w.env->step(action);
  } catch (const NumericError& e) {
    std::cerr << "env fault in episode " << w.episode_id << " at step " << step_index << ": " << e.what()
              << "; episode ended\n";
    w.actor->end_episode();
    ++episodes_;
    start_episode(w);
    return {};
  }
  w.actor->advance(origin, r.position);

  replay::Transition t;
  t.state = w.observation;
  t.action = spec.frame == Frame::ego_setpoint ? Vector(action + origin) : action;
  t.reward = r.reward;
  t.next_state = r.observation;
  t.terminal = r.terminal;
  t.episode_id = w.episode_id;
  t.step_index = static_cast<std::uint64_t>(step_index);
  if (spec.frame == Frame::ego_setpoint) t.origin = origin;
  buffer_.push(t);
  if (trajectory_) trajectory_->write(w.episode_id, step_index, w.observation, action, r.reward, r.terminal);

  ++steps_;
  if (steps_ <= config_.visitation_steps) visitation_.push_back(r.position);
  if (r.terminal == TerminalKind::terminal && !first_goal_step_) first_goal_step_ = steps_;
  w.episode_return += r.reward;
  if (r.done()) {
    w.actor->end_episode();
    ++episodes_;
    recent_returns_.push_back(w.episode_return);
    if (recent_returns_.size() > kRecentEpisodes) recent_returns_.erase(recent_returns_.begin());
    start_episode(w);
  } else {
    w.observation = r.observation;
  }
  return t;
}

TrainStats Trainer::train_iteration() { return agent_->train_iteration(buffer_, train_rng_); }

EvalStats Trainer::evaluate_now(int episodes) { return evaluate(*agent_, *prototype_, episodes, eval_seed_); }

replan::CommitmentStats Trainer::commitment() const {
  replan::CommitmentStats sum;
  for (const Worker& w : workers_) {
    if (const replan::CommitmentStats* s = w.actor->commitment()) {
      sum.switches += s->switches;
      sum.decisions += s->decisions;
      sum.completed += s->completed;
      sum.completed_steps += s->completed_steps;
      sum.truncated += s->truncated;
      sum.truncated_steps += s->truncated_steps;
    }
  }
  return sum;
}

RunResult Trainer::run(const std::optional<fs::path>& out_dir) {
  std::ofstream metrics, trace;
  if (out_dir) {
    fs::create_directories(*out_dir);
    write_text(*out_dir / "config.txt", config_.to_text());
    metrics = open_out(*out_dir / "metrics.csv");
    metrics << kMetricsHeader;
    trace = open_out(*out_dir / "trace.csv");
    trace << kTraceHeader;
    if (config_.write_trajectory) {
      trajectory_ = std::make_unique<env::TrajectoryWriter>(*out_dir / "trajectory.csv", prototype_->spec().obs_dim,
                                                            prototype_->spec().action_dim());
    }
  }

  RunResult result;
  const replan::SwitchState* sw = agent_->switch_state();
  result.min_epsilon = sw ? sw->epsilon : 0.0;
  TrainStats last;

  const auto record_eval = [&] {
    const EvalStats e = evaluate_now(config_.eval_episodes);
    const replan::CommitmentStats c = commitment();
    EvalRecord rec;
    rec.step = steps_;
    rec.episodes = episodes_;
    rec.eval_mean = e.mean;
    rec.eval_std = e.stddev;
    for (double r : recent_returns_) rec.train_return += r / double(recent_returns_.size());
    rec.alpha = agent_->learner().alpha();
    rec.epsilon = sw ? sw->epsilon : 0.0;
    rec.l_commit_ema = sw ? sw->l_commit_ema : 0.0;
    rec.switch_rate = switch_rate(c);
    rec.mean_commitment = c.mean_all();
    rec.critic_loss = last.critic_loss;
    rec.actor_loss = last.actor_loss;
    rec.entropy = last.entropy;
    result.evals.push_back(rec);
    if (metrics.is_open()) metrics << metrics_row(rec) << std::flush;
    return rec;
  };

  if (config_.eval_episodes > 0) record_eval();
  while (steps_ < config_.total_steps) {
    const long before = steps_;
    int stepped = 0;
    for (int i = 0; i < config_.actors && steps_ < config_.total_steps; ++i, ++stepped) rollout_step(i);
    if (sw) result.min_epsilon = std::min(result.min_epsilon, sw->epsilon);
    if (steps_ >= config_.warmup_steps && !buffer_.empty()) {
      for (int k = 0; k < stepped; ++k) {
        try {
          last = train_iteration();
        } catch (const NumericError& e) {
          if (out_dir) {
            write_text(*out_dir / "diagnostic.txt", fmt::format("step {}\n{}\n", steps_, e.what()));
            save_agent(*agent_, *out_dir / "diagnostic_params");
          }
          throw;
        }
        if (sw) result.min_epsilon = std::min(result.min_epsilon, sw->epsilon);
      }
    }
    if (steps_ / config_.trace_every > before / config_.trace_every) {
      TraceRecord t;
      t.step = steps_;
      t.alpha = agent_->learner().alpha();
      t.epsilon = sw ? sw->epsilon : 0.0;
      t.l_commit_ema = sw ? sw->l_commit_ema : 0.0;
      t.critic_loss = last.critic_loss;
      t.actor_loss = last.actor_loss;
      t.entropy = last.entropy;
      t.switch_rate = switch_rate(commitment());
      result.trace.push_back(t);
      if (trace.is_open()) trace << trace_row(t) << std::flush;
    }
    if (config_.stop_on_goal && first_goal_step_) {
      result.stopped_early = true;
      break;
    }
    const bool eval_due = steps_ / config_.eval_every > before / config_.eval_every || steps_ == config_.total_steps;
    if (eval_due && config_.eval_episodes > 0) {
      const EvalRecord rec = record_eval();
      if (config_.stop_at_return && rec.eval_mean >= *config_.stop_at_return) {
        result.stopped_early = steps_ < config_.total_steps;
        break;
      }
    }
  }

  result.steps = steps_;
  result.episodes = episodes_;
  result.first_goal_step = first_goal_step_;
  result.commitment = commitment();
  result.visitation = visitation_;

  if (out_dir) {
    trajectory_.reset();
    std::ofstream vis = open_out(*out_dir / "visitation.csv");
    vis << "step";
    for (int d = 0; d < prototype_->spec().position_dim; ++d) vis << ",pos_" << d;
    vis << '\n';
    for (std::size_t i = 0; i < visitation_.size(); ++i) {
      vis << (i + 1);
      for (Eigen::Index d = 0; d < visitation_[i].size(); ++d) vis << fmt::format(",{}", visitation_[i](d));
      vis << '\n';
    }
    Series s{agent_->name() + " (eval mean +- std)", {}, {}, {}};
    for (const EvalRecord& r : result.evals) {
      s.x.push_back(double(r.step));
      s.y.push_back(r.eval_mean);
      s.spread.push_back(r.eval_std);
    }
    write_text(*out_dir / "returns.svg",
               line_plot_svg(config_.task + " returns", "environment steps", "evaluation return", {s}));
    write_text(*out_dir / "visitation.svg",
               visitation_svg(fmt::format("{} visitation, first {} steps", config_.task, visitation_.size()),
                              visitation_));
    save_agent(*agent_, *out_dir / "params");
  }
  return result;
}

void save_agent(const Agent& agent, const fs::path& dir) {
  fs::create_directories(dir);
  const GpmLearner& l = agent.learner();
  const auto save = [&](const char* name, const diff::ParamStore& store) {
    std::ofstream out = open_out(dir / name);
    diff::write_params(out, store);
  };
  save("actor.bin", l.actor().params());
  save("critic_0.bin", l.critics().critic(0).params());
  save("critic_1.bin", l.critics().critic(1).params());
  save("target_0.bin", l.critics().target(0).params());
  save("target_1.bin", l.critics().target(1).params());
  save("alpha.bin", l.alpha_params());
  if (const replan::SwitchState* s = agent.switch_state()) {
    write_text(dir / "replan.txt", fmt::format("epsilon = {}\nl_commit_ema = {}\n", s->epsilon, s->l_commit_ema));
  }
}

void load_agent(Agent& agent, const fs::path& dir) {
  GpmLearner& l = agent.learner();
  const auto load = [&](const char* name, diff::ParamStore& store) {
    std::ifstream in(dir / name, std::ios::binary);
    if (!in) throw UsageError("cannot read " + (dir / name).string());
    diff::read_params(in, store);
  };
  load("actor.bin", l.actor().params());
  load("critic_0.bin", l.critics().critic(0).params());
  load("critic_1.bin", l.critics().critic(1).params());
  load("target_0.bin", l.critics().target(0).params());
  load("target_1.bin", l.critics().target(1).params());
  load("alpha.bin", l.alpha_params());
  if (auto* gpm = dynamic_cast<GpmAgent*>(&agent)) {
    std::ifstream in(dir / "replan.txt");
    if (!in) throw UsageError("cannot read " + (dir / "replan.txt").string());
    std::string key, eq;
    double v = 0.0;
    while (in >> key >> eq >> v) {
      if (key == "epsilon") gpm->mutable_switch_state().epsilon = v;
      if (key == "l_commit_ema") gpm->mutable_switch_state().l_commit_ema = v;
    }
  }
}

}  // namespace planrl::harness
