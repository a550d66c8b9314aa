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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            all criteria
//   acceptance 2 8 9      a subset

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "gradcheck.hpp"
#include "planrl/envs/env.hpp"
#include "planrl/harness/trainer.hpp"
#include "toy_mdp.hpp"

using namespace planrl;
using namespace planrl::harness;
namespace fs = std::filesystem;
using diff::Tape;
using diff::Var;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

void randomize(diff::ParamStore& store, Rng& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  for (auto& p : store) p.value = p.value.unaryExpr([&](double) { return n(rng); });
}

std::vector<Matrix> snapshot(const Agent& a) {
  std::vector<Matrix> out;
  const GpmLearner& l = a.learner();
  for (const auto& p : l.actor().params()) out.push_back(p.value);
  for (int i = 0; i < 2; ++i) {
    for (const auto& p : l.critics().critic(i).params()) out.push_back(p.value);
    for (const auto& p : l.critics().target(i).params()) out.push_back(p.value);
  }
  for (const auto& p : l.alpha_params()) out.push_back(p.value);
  return out;
}

bool bit_identical(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols()) return false;
    if (std::memcmp(a[i].data(), b[i].data(), sizeof(double) * std::size_t(a[i].size())) != 0) return false;
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("planrl_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

// 1 -------------------------------------------------------------------------

Outcome gradient_integrity() {
  constexpr int kProbes = 60;
  constexpr double kTolerance = 1e-4;
  Rng rng(101);

  plan::GeneratorConfig gc;
  gc.obs_dim = 3;
  gc.bounds = ActionBounds::symmetric(2, 1.5);
  gc.plan_length = 3;
  gc.hidden = {6, 5};
  value::CriticConfig cc;
  cc.obs_dim = 3;
  cc.bounds = gc.bounds;
  cc.hidden = {6, 5};

  // actor loss through the twin critic, with the recurrent inputs frozen at
  // the nominal plan as the analytic pass detaches them
  double actor_worst = 0.0;
  for (auto prior : {plan::DecoderPrior::repeat, plan::DecoderPrior::linear}) {
    gc.prior = prior;
    plan::PlanGenerator actor(gc, rng);
    randomize(actor.params(), rng, 0.4);
    value::CriticEnsemble critics(cc, rng);
    for (int i = 0; i < 2; ++i) randomize(critics.critic(i).params(), rng, 0.4);
    const Matrix states = Matrix::Random(5, 3);
    const Matrix noise = actor.draw_noise(5, rng);
    const double alpha = 0.3;
    Tape tape;
    tape.backward(actor.actor_loss(tape, states, critics, alpha, noise));
    const auto analytic = testing::grads_of(actor.params());
    std::vector<Matrix> frozen;
    {
      Tape probe(false);
      frozen = actor.recurrent_inputs(actor.rollout(probe, probe.constant(states), noise, false));
    }
    const auto loss = [&] {
      Tape t(false);
      Var s = t.constant(states);
      auto r = actor.rollout(t, s, noise, false, frozen);
      return (t.mean(r.log_prob) * alpha - t.mean(critics.min_values(t, s, r.actions, false))).scalar();
    };
    actor_worst = std::max(actor_worst,
                           testing::max_rel_error(testing::probe_gradients(actor.params(), analytic, loss, kProbes, rng)));
  }

  // critic loss on a random plan batch
  double critic_worst = 0.0;
  {
    value::CriticEnsemble critics(cc, rng);
    for (int i = 0; i < 2; ++i) randomize(critics.critic(i).params(), rng, 0.4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> len(1, 3);
    replay::SampledPlanBatch b;
    const int B = 6;
    b.states = Matrix::NullaryExpr(B, 3, [&] { return u(rng); });
    b.next_states = Matrix::NullaryExpr(B, 3, [&] { return u(rng); });
    for (int k = 0; k < 3; ++k) b.actions.push_back(Matrix::NullaryExpr(B, 2, [&] { return u(rng); }));
    b.rewards = Matrix::Zero(B, 3);
    for (int i = 0; i < B; ++i) {
      b.lengths.push_back(len(rng));
      b.bootstrap.push_back(i % 3 == 0 ? 0 : 1);
      for (int k = 0; k < b.lengths.back(); ++k) b.rewards(i, k) = u(rng);
      b.anchors.push_back(std::size_t(i));
    }
    const Vector targets = Vector::NullaryExpr(B, [&] { return u(rng); });
    Tape tape;
    tape.backward(value::critic_loss(tape, b, targets, critics));
    for (int i = 0; i < 2; ++i) {
      auto& store = critics.critic(i).params();
      const auto analytic = testing::grads_of(store);
      const auto loss = [&] {
        Tape t(false);
        return value::critic_loss(t, b, targets, critics).scalar();
      };
      critic_worst =
          std::max(critic_worst, testing::max_rel_error(testing::probe_gradients(store, analytic, loss, kProbes, rng)));
    }
  }

  // temperature objective at random temperatures and entropies
  double alpha_worst = 0.0;
  {
    LearnerConfig lc;
    lc.obs_dim = 3;
    lc.bounds = gc.bounds;
    lc.actor_hidden = {4, 4};
    lc.critic_hidden = {4, 4};
    GpmLearner learner(lc, rng);
    diff::ParamStore& store = learner.alpha_params();
    std::uniform_real_distribution<double> log_alpha(-4.0, 2.0), entropy(-6.0, 4.0);
    for (int probe = 0; probe < kProbes; ++probe) {
      store[0].value(0, 0) = log_alpha(rng);
      const double h = entropy(rng);
      store.zero_grad();
      learner.alpha_objective(h);
      const double analytic = store[0].grad(0, 0);
      const double numeric =
          testing::central_difference(store, 0, 0, 0, [&] { return learner.alpha_objective(h); });
      alpha_worst = std::max(alpha_worst, testing::relative_error(analytic, numeric));
    }
  }

  const bool pass = actor_worst < kTolerance && critic_worst < kTolerance && alpha_worst < kTolerance;
  return {pass, fmt::format("max relative error over {} probes each: actor {:.2e}, critic {:.2e}, alpha {:.2e} "
                            "(limit {:.0e})",
                            kProbes, actor_worst, critic_worst, alpha_worst, kTolerance)};
}

// 2 -------------------------------------------------------------------------

Outcome sac_reduction() {
  AgentConfig fill;
  fill.plan_length = 1;
  Trainer source(fill);
  for (int i = 0; i < 2000; ++i) source.rollout_step(0);

  AgentConfig gc;
  gc.agent = "gpm";
  gc.plan_length = 1;
  gc.mode = replan::Mode::mpc;
  AgentConfig sc;
  sc.agent = "sac";
  const auto pendulum = env::make_env("pendulum");
  const env::EnvSpec& spec = pendulum->spec();
  Rng gi(202), si(202);
  auto gpm = make_agent(gc, spec.obs_dim, spec.bounds, spec.frame, gi);
  auto sac = make_agent(sc, spec.obs_dim, spec.bounds, spec.frame, si);
  if (!bit_identical(snapshot(*gpm), snapshot(*sac))) return {false, "initial parameters differ"};
  Rng gr(203), sr(203);
  for (int step = 1; step <= 100; ++step) {
    const TrainStats a = gpm->train_iteration(source.buffer(), gr);
    const TrainStats b = sac->train_iteration(source.buffer(), sr);
    if (!bit_identical(snapshot(*gpm), snapshot(*sac)) || a.critic_loss != b.critic_loss ||
        a.actor_loss != b.actor_loss) {
      return {false, fmt::format("trajectories diverge at update {}", step)};
    }
  }
  return {true, "parameters and losses bit-identical over 100 updates from a shared 2000-step buffer"};
}

// 3 -------------------------------------------------------------------------

Outcome bellman_oracle() {
  const auto r = testing::run_bellman_toy(6000, 11);
  return {r.max_error < 1e-2, fmt::format("max |learned - DP| over {} (critic, state, prefix) pairs: {:.2e} "
                                          "(limit 1e-2)",
                                          r.pairs, r.max_error)};
}

// 4 -------------------------------------------------------------------------

Outcome commitment_loop() {
  AgentConfig c;
  c.task = "pendulum";
  c.plan_length = 3;
  c.hidden = {64, 64};
  c.l_commit_target = 1.5;
  c.total_steps = 30000;
  c.eval_episodes = 0;
  c.trace_every = 100;
  c.write_trajectory = false;
  Trainer t(c);
  const RunResult r = t.run();
  const double target = 1.5;
  const long window_start = c.total_steps * 4 / 5;
  double lo = 1e300, hi = -1e300;
  int samples = 0;
  for (const TraceRecord& rec : r.trace) {
    if (rec.step <= window_start) continue;
    lo = std::min(lo, rec.l_commit_ema);
    hi = std::max(hi, rec.l_commit_ema);
    ++samples;
  }
  const bool settled = samples > 0 && lo >= 0.7 * target && hi <= 1.3 * target;
  const bool eps_ok = r.min_epsilon >= 0.0;
  return {settled && eps_ok,
          fmt::format("ema over the final 20% ({} samples) in [{:.3f}, {:.3f}], band [{:.2f}, {:.2f}]; "
                      "min epsilon {:.4f}",
                      samples, lo, hi, 0.7 * target, 1.3 * target, r.min_epsilon)};
}

// 5 -------------------------------------------------------------------------

Outcome pendulum_smoke() {
  int reached = 0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    AgentConfig c;
    c.task = "pendulum";
    c.seed = seed;
    c.total_steps = 30000;
    c.eval_every = 1000;
    c.eval_episodes = 10;
    c.stop_at_return = -300.0;
    c.write_trajectory = false;
    const auto start = std::chrono::steady_clock::now();
    Trainer t(c);
    const RunResult r = t.run();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double best = -1e300;
    for (const EvalRecord& e : r.evals) best = std::max(best, e.eval_mean);
    const bool ok = best >= -300.0;
    reached += ok ? 1 : 0;
    per_seed += fmt::format("{}seed {}: best {:.1f} at {} steps ({:.0f} s)", per_seed.empty() ? "" : "; ", seed, best,
                            r.steps, seconds);
    std::cerr << "  [5] seed " << seed << ": best " << best << " after " << r.steps << " steps, " << seconds
              << " s\n";
  }
  return {reached >= 4, fmt::format("{}/5 seeds reach -300 ({})", reached, per_seed)};
}

// 6 -------------------------------------------------------------------------

struct Exploration {
  std::optional<long> goal;
  int coverage = 0;
  long steps = 0;
};

using Clock = std::chrono::steady_clock;

// Single-worker training loop (as in Trainer::run) that stops once the goal
// has been reached and the coverage window is complete, or at the deadline.
Exploration explore(const AgentConfig& c, long budget, Clock::time_point deadline) {
  Trainer t(c);
  while (t.steps() < budget && Clock::now() < deadline) {
    t.rollout_step(0);
    if (t.steps() >= c.warmup_steps) t.train_iteration();
    if (t.first_goal_step() && t.steps() >= c.visitation_steps) break;
  }
  return {t.first_goal_step(),
          count_position_bins(t.visitation(), env::MountainCar::kMinPosition, env::MountainCar::kMaxPosition, 100),
          t.steps()};
}

Outcome exploration_claim() {
  constexpr long kBudget = 50000;
  constexpr long kCoverageSteps = 5000;
  constexpr int kSeeds = 5;
  const Clock::time_point deadline = Clock::now() + std::chrono::seconds(1800);
  const auto config = [&](const std::string& agent, std::uint64_t seed) {
    AgentConfig c;
    c.task = "mountaincar";
    c.agent = agent;
    c.seed = seed;
    c.plan_length = 10;
    c.hidden = {64, 64};
    c.batch_size = 64;
    c.learning_rate = 1e-4;
    c.total_steps = kBudget;
    c.visitation_steps = kCoverageSteps;
    c.eval_episodes = 0;
    c.write_trajectory = false;
    return c;
  };
  const auto show = [](const Exploration& e) {
    return e.goal ? std::to_string(*e.goal) : fmt::format("none in {}", e.steps);
  };
  const auto never = Clock::time_point::max();

  // The cheap agents run first; GPM seeds share what is left of the budget.
  std::vector<Exploration> ez, sac, gpm;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) ez.push_back(explore(config("ez", seed), kCoverageSteps, never));
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) sac.push_back(explore(config("sac", seed), kBudget, never));
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const auto share = (deadline - Clock::now()) / int(kSeeds - seed);
    gpm.push_back(explore(config("gpm", seed), kBudget, Clock::now() + share));
  }

  int gpm_goals = 0, sac_goals = 0;
  double gpm_cov = 0.0, sac_cov = 0.0, ez_cov = 0.0;
  bool gpm_window = true;
  std::string goals;
  for (std::size_t i = 0; i < kSeeds; ++i) {
    gpm_goals += gpm[i].goal ? 1 : 0;
    sac_goals += sac[i].goal ? 1 : 0;
    gpm_cov += gpm[i].coverage / double(kSeeds);
    sac_cov += sac[i].coverage / double(kSeeds);
    ez_cov += ez[i].coverage / double(kSeeds);
    gpm_window = gpm_window && gpm[i].steps >= kCoverageSteps;
    goals += fmt::format("{}gpm {} / sac {}", goals.empty() ? "" : "; ", show(gpm[i]), show(sac[i]));
    std::cerr << "  [6] seed " << i << ": first goal gpm " << show(gpm[i]) << ", sac " << show(sac[i])
              << "; coverage gpm " << gpm[i].coverage << ", sac " << sac[i].coverage << ", ez " << ez[i].coverage
              << '\n';
  }
  const bool goals_ok = gpm_goals >= 4 && sac_goals <= 2;
  const bool coverage_ok = gpm_window && gpm_cov >= 1.25 * sac_cov && ez_cov >= 1.25 * sac_cov;
  return {goals_ok && coverage_ok,
          fmt::format("goal reached gpm {}/5, sac {}/5 (first goal step per seed: {}); mean bins visited in the "
                      "first {} steps gpm {:.1f}, ez {:.1f}, sac {:.1f} (need >= {:.1f})",
                      gpm_goals, sac_goals, goals, kCoverageSteps, gpm_cov, ez_cov, sac_cov, 1.25 * sac_cov)};
}

// 7 -------------------------------------------------------------------------

Outcome mode_ablations() {
  const auto measure = [](replan::Mode mode) {
    AgentConfig c;
    c.task = "pendulum";
    c.mode = mode;
    c.plan_length = 3;
    c.total_steps = 2400;
    c.eval_episodes = 0;
    c.write_trajectory = false;
    Trainer t(c);
    return t.run().commitment.mean_completed();
  };
  const double mpc = measure(replan::Mode::mpc);
  const double commit = measure(replan::Mode::commit);
  const double standard = measure(replan::Mode::standard);
  const bool pass = mpc == 1.0 && commit == 3.0 && standard > 1.0 && standard < 3.0;
  return {pass, fmt::format("mean completed commitment: mpc {:.4f}, commit {:.4f} (L = 3), standard {:.4f}", mpc,
                            commit, standard)};
}

// 8 -------------------------------------------------------------------------

Outcome replay_law() {
  constexpr int L = 4;
  Rng rng(808);

  // mid-episode uniformity on long episodes
  replay::ReplayBuffer long_episodes(200000);
  for (std::uint64_t e = 0; e < 20; ++e) {
    for (int t = 0; t < 5000; ++t) {
      replay::Transition tr;
      tr.state = Vector::Constant(1, double(t));
      tr.action = Vector::Constant(1, 0.0);
      tr.next_state = Vector::Constant(1, double(t + 1));
      tr.terminal = t + 1 == 5000 ? (e % 2 ? TerminalKind::terminal : TerminalKind::timeout) : TerminalKind::none;
      tr.episode_id = e;
      tr.step_index = std::uint64_t(t);
      long_episodes.push(tr);
    }
  }
  std::vector<double> counts(L, 0.0);
  int n = 0;
  while (n < 100000) {
    const auto batch = long_episodes.sample_plan_batch(1000, L, rng);
    for (int i = 0; i < batch.size() && n < 100000; ++i) {
      const auto& first = long_episodes.at(batch.anchors[std::size_t(i)]);
      if (first.step_index + L > 5000) continue;
      counts[std::size_t(batch.lengths[std::size_t(i)] - 1)] += 1.0;
      ++n;
    }
  }
  double stat = 0.0;
  for (double c : counts) stat += (c - n / double(L)) * (c - n / double(L)) / (n / double(L));
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(L - 1), stat));

  // episode boundaries on short, wrapped episodes
  replay::ReplayBuffer short_episodes(3000);
  std::uniform_int_distribution<int> len(1, 12);
  std::bernoulli_distribution terminal(0.5);
  for (std::uint64_t e = 0; e < 1000; ++e) {
    const int length = len(rng);
    for (int t = 0; t < length; ++t) {
      replay::Transition tr;
      tr.state = Vector::Constant(1, double(t));
      tr.action = Vector::Constant(1, double(e));
      tr.next_state = Vector::Constant(1, double(t + 1));
      tr.terminal = t + 1 == length ? (terminal(rng) ? TerminalKind::terminal : TerminalKind::timeout)
                                    : TerminalKind::none;
      tr.episode_id = e;
      tr.step_index = std::uint64_t(t);
      short_episodes.push(tr);
    }
  }
  long crossing = 0, sampled = 0;
  while (sampled < 1000000) {
    const auto batch = short_episodes.sample_plan_batch(1000, L, rng);
    for (int i = 0; i < batch.size(); ++i) {
      const std::size_t anchor = batch.anchors[std::size_t(i)];
      const auto& first = short_episodes.at(anchor);
      bool ok = true;
      for (int k = 1; k < batch.lengths[std::size_t(i)]; ++k) {
        const auto& t = short_episodes.at(anchor + std::size_t(k));
        ok = ok && t.episode_id == first.episode_id && t.step_index == first.step_index + std::uint64_t(k) &&
             batch.actions[std::size_t(k)](i, 0) == double(first.episode_id);
      }
      crossing += ok ? 0 : 1;
      ++sampled;
    }
  }
  return {p > 0.01 && crossing == 0,
          fmt::format("chi-square p = {:.3f} over {} mid-episode samples on {{1..{}}} (counts {:.0f} {:.0f} {:.0f} "
                      "{:.0f}); {} cross-episode plans in {} samples",
                      p, n, L, counts[0], counts[1], counts[2], counts[3], crossing, sampled)};
}

// 9 -------------------------------------------------------------------------

Outcome frame_algebra() {
  Rng rng(909);
  std::normal_distribution<double> n(0.0, 5.0);
  std::uniform_real_distribution<double> delta_dist(0.0, 6.0);
  double norm_err = 0.0, continuity = 0.0, edge = 0.0;
  for (int i = 0; i < 20000; ++i) {
    Vector a(2);
    a << n(rng), n(rng);
    const double delta = delta_dist(rng);
    const Vector s = env::shrink_setpoint(a, delta);
    norm_err = std::max(norm_err, std::abs(s.norm() - std::max(a.norm() - delta, 0.0)));
    if (s.norm() > 0.0) norm_err = std::max(norm_err, (s / s.norm() - a / a.norm()).norm());
    Vector da(2);
    da << n(rng), n(rng);
    da *= 1e-7 / da.norm();
    continuity = std::max(continuity, (env::shrink_setpoint(a + da, delta) - s).norm() / 1e-7);
    // approach the dead-zone edge along the ray
    const Vector on_edge = a / a.norm() * (delta + 1e-9);
    edge = std::max(edge, env::shrink_setpoint(on_edge, delta).norm());
  }

  double round_trip = 0.0, forward = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    plan::Plan p{{}, Frame::ego_setpoint};
    for (int i = 0; i < 6; ++i) {
      Vector v(2);
      v << n(rng), n(rng);
      p.actions.push_back(v);
    }
    Vector o1(2), o2(2);
    o1 << n(rng) * 10, n(rng) * 10;
    o2 << n(rng) * 10, n(rng) * 10;
    const plan::Plan back = replan::to_ego(replan::to_world(p, o1), o1);
    const plan::Plan world = replan::to_world(p, o1);
    const plan::Plan there = replan::to_world(replan::to_ego(world, o2), o2);
    for (std::size_t i = 0; i < p.size(); ++i) {
      round_trip = std::max(round_trip, (back[i] - p[i]).cwiseAbs().maxCoeff());
      round_trip = std::max(round_trip, (there[i] - world[i]).cwiseAbs().maxCoeff());
    }
    // time-forwarding keeps every remaining setpoint fixed in the world
    const plan::Plan moved = replan::to_world(replan::rho(p, o1, o2), o2);
    for (std::size_t i = 0; i < moved.size(); ++i) {
      forward = std::max(forward, (moved[i] - world[i + 1]).cwiseAbs().maxCoeff());
    }
  }
  const bool pass = norm_err <= 1e-12 && continuity <= 1.0 + 1e-6 && edge <= 1e-8 && round_trip <= 1e-12 &&
                    forward <= 1e-12;
  return {pass, fmt::format("shrinkage norm/direction error {:.1e}, Lipschitz ratio {:.6f}, edge norm {:.1e}; "
                            "ego<->world round trip {:.1e}, time-forward drift {:.1e} (limit 1e-12)",
                            norm_err, continuity, edge, round_trip, forward)};
}

// 10 ------------------------------------------------------------------------

Outcome determinism() {
  AgentConfig c;
  c.task = "pendulum";
  c.total_steps = 3000;
  c.eval_every = 1000;
  c.eval_episodes = 2;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  Trainer(c).run(a);
  Trainer(c).run(b);
  const std::string ma = slurp(a / "metrics.csv"), mb = slurp(b / "metrics.csv");
  const bool same = !ma.empty() && ma == mb;
  const long rows = std::count(ma.begin(), ma.end(), '\n');
  fs::remove_all(a);
  fs::remove_all(b);
  return {same, fmt::format("metrics.csv {} ({} bytes, {} lines)", same ? "byte-identical" : "differs",
                            ma.size(), rows)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "gradient integrity", 60, gradient_integrity},
      {2, "SAC reduction", 60, sac_reduction},
      {3, "Bellman oracle", 120, bellman_oracle},
      {4, "commitment control loop", 600, commitment_loop},
      {5, "Pendulum smoke performance", 5 * 900, pendulum_smoke},
      {6, "exploration on MountainCar", 1800, exploration_claim},
      {7, "mode ablations", 300, mode_ablations},
      {8, "replay law", 60, replay_law},
      {9, "shrinkage and frame algebra", 10, frame_algebra},
      {10, "determinism", 300, determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::cout << fmt::format("criterion {:>2} {}: {} | {} | {:.1f} s of {:.0f} s budget{}\n", c.id, c.name,
                             pass ? "PASS" : "FAIL", o.detail, seconds, c.budget_seconds,
                             in_time ? "" : " (over budget)")
              << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
