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

// planrl run   [--config FILE] [--out DIR] [--key value ...]
// planrl eval  --run DIR [--episodes N] [--seed S]
// planrl sweep [--config FILE] --seeds 0,1,2 [--out DIR] [--key value ...]

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

#include <fmt/format.h>

#include "planrl/envs/env.hpp"
#include "planrl/harness/plots.hpp"
#include "planrl/harness/trainer.hpp"

namespace fs = std::filesystem;
using namespace planrl;
using namespace planrl::harness;

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

Overrides parse_overrides(const std::vector<std::string>& extras) {
  Overrides out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0) throw ConfigError("expected --key value, got '" + arg + "'");
    std::string key = arg.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("field '" + key + "': missing value");
      value = extras[++i];
    }
    std::replace(key.begin(), key.end(), '-', '_');
    out.emplace_back(key, value);
  }
  return out;
}

fs::path default_out(const AgentConfig& c) {
  return fs::path("runs") / fmt::format("{}-{}-seed{}", c.task, c.agent, c.seed);
}

void print_summary(const AgentConfig& c, const RunResult& r) {
  std::cout << fmt::format("{} {} seed {}: {} steps, {} episodes", c.task, c.agent, c.seed, r.steps, r.episodes);
  if (!r.evals.empty()) std::cout << fmt::format(", final eval {:.2f}", r.evals.back().eval_mean);
  if (r.first_goal_step) std::cout << fmt::format(", first goal at step {}", *r.first_goal_step);
  std::cout << '\n';
}

int cmd_run(const std::optional<fs::path>& config_file, const std::optional<fs::path>& out,
            const Overrides& overrides) {
  const AgentConfig c = AgentConfig::from_sources(config_file, overrides);
  const fs::path dir = out.value_or(default_out(c));
  Trainer trainer(c);
  const RunResult r = trainer.run(dir);
  print_summary(c, r);
  std::cout << "artifacts in " << dir.string() << '\n';
  return 0;
}

int cmd_eval(const fs::path& run_dir, int episodes, std::optional<std::uint64_t> seed) {
  const AgentConfig c = AgentConfig::load(run_dir / "config.txt");
  Trainer trainer(c);
  load_agent(trainer.agent(), run_dir / "params");
  const auto prototype = env::make_env(c.task);
  const EvalStats e = evaluate(trainer.agent(), *prototype, episodes, seed.value_or(c.seed));
  std::cout << fmt::format("eval over {} episodes: mean {:.4f} std {:.4f}\n", episodes, e.mean, e.stddev);
  for (std::size_t i = 0; i < e.returns.size(); ++i) std::cout << fmt::format("  episode {}: {:.4f}\n", i, e.returns[i]);
  return 0;
}

int cmd_sweep(const std::optional<fs::path>& config_file, const std::optional<fs::path>& out,
              const std::vector<std::uint64_t>& seeds, const Overrides& overrides) {
  const AgentConfig base = AgentConfig::from_sources(config_file, overrides);
  const fs::path dir = out.value_or(fs::path("runs") / fmt::format("{}-{}-sweep", base.task, base.agent));
  fs::create_directories(dir);
  std::string summary = "seed,steps,episodes,final_eval_mean,best_eval_mean,first_goal_step,mean_commitment\n";
  std::vector<Series> curves;
  for (std::uint64_t seed : seeds) {
    AgentConfig c = base;
    c.seed = seed;
    Trainer trainer(c);
    const RunResult r = trainer.run(dir / fmt::format("seed_{}", seed));
    print_summary(c, r);
    double best = r.evals.empty() ? 0.0 : r.evals.front().eval_mean;
    Series s{fmt::format("seed {}", seed), {}, {}, {}};
    for (const EvalRecord& e : r.evals) {
      best = std::max(best, e.eval_mean);
      s.x.push_back(double(e.step));
      s.y.push_back(e.eval_mean);
    }
    curves.push_back(s);
    summary += fmt::format("{},{},{},{},{},{},{}\n", seed, r.steps, r.episodes,
                           r.evals.empty() ? 0.0 : r.evals.back().eval_mean, best,
                           r.first_goal_step ? std::to_string(*r.first_goal_step) : std::string("none"),
                           r.commitment.mean_all());
  }
  write_text(dir / "summary.csv", summary);
  write_text(dir / "returns.svg",
             line_plot_svg(base.task + " " + base.agent + " returns", "environment steps", "evaluation return", curves));
  std::cout << "artifacts in " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan-based actor-critic training and evaluation"};
  app.require_subcommand(1);

  std::optional<fs::path> config_file, out;
  auto* run = app.add_subcommand("run", "Train one agent; any config key is accepted as --key value");
  run->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
  run->add_option("--out", out, "run directory (default runs/<task>-<agent>-seed<seed>)");
  run->allow_extras();

  fs::path run_dir;
  int episodes = 10;
  std::optional<std::uint64_t> eval_seed;
  auto* ev = app.add_subcommand("eval", "Evaluate the parameter snapshot of a finished run");
  ev->add_option("--run", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--episodes", episodes, "evaluation episodes")->check(CLI::PositiveNumber);
  ev->add_option("--seed", eval_seed, "evaluation seed (default: the run seed)");

  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  auto* sweep = app.add_subcommand("sweep", "Train one configuration over several seeds");
  sweep->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "sweep directory");
  sweep->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
  sweep->allow_extras();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config_file, out, parse_overrides(run->remaining()));
    if (ev->parsed()) return cmd_eval(run_dir, episodes, eval_seed);
    if (sweep->parsed()) return cmd_sweep(config_file, out, seeds, parse_overrides(sweep->remaining()));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
