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

#include "planrl/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "planrl/baselines/baselines.hpp"
#include "planrl/envs/env.hpp"

namespace planrl::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) throw ConfigError("expected a number, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("expected true or false, got '" + text + "'");
}

std::vector<int> parse_widths(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(parse_number<int>(trim(part)));
  if (out.empty()) throw ConfigError("expected comma-separated widths, got '" + text + "'");
  return out;
}

std::string number(double v) { return fmt::format("{}", v); }

template <class T>
std::string optional_text(const std::optional<T>& v) {
  return v ? fmt::format("{}", *v) : "auto";
}

template <class T>
std::optional<T> parse_optional(const std::string& text) {
  if (text == "auto") return std::nullopt;
  return parse_number<T>(text);
}

struct Field {
  const char* key;
  std::function<void(AgentConfig&, const std::string&)> set;
  std::function<std::string(const AgentConfig&)> get;
};

#define PLANRL_NUMBER(name, member, type)                                                       \
  Field {                                                                                       \
    name, [](AgentConfig& c, const std::string& v) { c.member = parse_number<type>(v); },      \
        [](const AgentConfig& c) { return fmt::format("{}", c.member); }                        \
  }
#define PLANRL_OPTIONAL(name, member, type)                                                     \
  Field {                                                                                       \
    name, [](AgentConfig& c, const std::string& v) { c.member = parse_optional<type>(v); },    \
        [](const AgentConfig& c) { return optional_text(c.member); }                            \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"task", [](AgentConfig& c, const std::string& v) { c.task = v; }, [](const AgentConfig& c) { return c.task; }},
      {"agent", [](AgentConfig& c, const std::string& v) { c.agent = v; },
       [](const AgentConfig& c) { return c.agent; }},
      {"mode", [](AgentConfig& c, const std::string& v) { c.mode = replan::parse_mode(v); },
       [](const AgentConfig& c) { return replan::to_string(c.mode); }},
      PLANRL_NUMBER("seed", seed, std::uint64_t),
      PLANRL_NUMBER("total_steps", total_steps, long),
      PLANRL_NUMBER("warmup_steps", warmup_steps, long),
      PLANRL_NUMBER("actors", actors, int),
      {"hidden", [](AgentConfig& c, const std::string& v) { c.hidden = parse_widths(v); },
       [](const AgentConfig& c) { return fmt::format("{}", fmt::join(c.hidden, ",")); }},
      PLANRL_NUMBER("learning_rate", learning_rate, double),
      PLANRL_NUMBER("batch_size", batch_size, int),
      PLANRL_NUMBER("plan_length", plan_length, int),
      PLANRL_NUMBER("gamma", gamma, double),
      PLANRL_NUMBER("eta", eta, double),
      PLANRL_OPTIONAL("target_entropy", target_entropy, double),
      PLANRL_NUMBER("alpha_init", alpha_init, double),
      {"prior",
       [](AgentConfig& c, const std::string& v) {
         if (v == "repeat") {
           c.prior = plan::DecoderPrior::repeat;
         } else if (v == "linear") {
           c.prior = plan::DecoderPrior::linear;
         } else {
           throw ConfigError("expected repeat or linear, got '" + v + "'");
         }
       },
       [](const AgentConfig& c) { return std::string(c.prior == plan::DecoderPrior::repeat ? "repeat" : "linear"); }},
      PLANRL_NUMBER("residual_scale", residual_scale, double),
      PLANRL_OPTIONAL("l_commit_target", l_commit_target, double),
      PLANRL_NUMBER("kappa", kappa, double),
      PLANRL_NUMBER("ema_coeff", ema_coeff, double),
      PLANRL_NUMBER("epsilon_init", epsilon_init, double),
      PLANRL_OPTIONAL("epsilon_learning_rate", epsilon_learning_rate, double),
      PLANRL_OPTIONAL("repeat_k", repeat_k, int),
      PLANRL_NUMBER("ez_exponent", ez_exponent, double),
      PLANRL_OPTIONAL("ez_max_duration", ez_max_duration, int),
      PLANRL_NUMBER("eval_every", eval_every, long),
      PLANRL_NUMBER("eval_episodes", eval_episodes, int),
      PLANRL_NUMBER("trace_every", trace_every, long),
      PLANRL_NUMBER("visitation_steps", visitation_steps, long),
      PLANRL_NUMBER("capacity", capacity, std::size_t),
      PLANRL_OPTIONAL("stop_at_return", stop_at_return, double),
      {"stop_on_goal", [](AgentConfig& c, const std::string& v) { c.stop_on_goal = parse_bool(v); },
       [](const AgentConfig& c) { return std::string(c.stop_on_goal ? "true" : "false"); }},
      {"write_trajectory", [](AgentConfig& c, const std::string& v) { c.write_trajectory = parse_bool(v); },
       [](const AgentConfig& c) { return std::string(c.write_trajectory ? "true" : "false"); }},
  };
  return table;
}

#undef PLANRL_NUMBER
#undef PLANRL_OPTIONAL

[[noreturn]] void field_error(const std::string& key, const std::string& message) {
  throw ConfigError("field '" + key + "': " + message);
}

}  // namespace

std::vector<std::string> AgentConfig::keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.emplace_back(f.key);
  return out;
}

void AgentConfig::set(const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (key != f.key) continue;
    try {
      f.set(*this, trim(value));
    } catch (const ConfigError& e) {
      field_error(key, e.what());
    }
    return;
  }
  field_error(key, "unknown key");
}

void AgentConfig::validate() const {
  const auto positive = [](const char* key, double v) {
    if (!(v > 0.0)) field_error(key, "must be positive, got " + number(v));
  };
  if (task != "pendulum" && task != "mountaincar" && task != "pointmass") {
    field_error("task", "expected pendulum, mountaincar or pointmass, got '" + task + "'");
  }
  if (agent != "gpm" && agent != "sac" && agent != "far" && agent != "ez") {
    field_error("agent", "expected gpm, sac, far or ez, got '" + agent + "'");
  }
  positive("total_steps", double(total_steps));
  if (warmup_steps < 0) field_error("warmup_steps", "must be non-negative");
  positive("actors", actors);
  for (int w : hidden) {
    if (w < 1) field_error("hidden", "widths must be positive");
  }
  if (hidden.size() < 2) field_error("hidden", "needs at least two widths");
  positive("learning_rate", learning_rate);
  positive("batch_size", batch_size);
  positive("plan_length", plan_length);
  if (!(gamma > 0.0 && gamma <= 1.0)) field_error("gamma", "must lie in (0, 1]");
  if (!(eta > 0.0 && eta <= 1.0)) field_error("eta", "must lie in (0, 1]");
  positive("alpha_init", alpha_init);
  if (residual_scale < 0.0) field_error("residual_scale", "must be non-negative");
  if (l_commit_target) positive("l_commit_target", *l_commit_target);
  positive("kappa", kappa);
  if (!(ema_coeff >= 0.0 && ema_coeff < 1.0)) field_error("ema_coeff", "must lie in [0, 1)");
  if (epsilon_init < 0.0) field_error("epsilon_init", "must be non-negative");
  if (epsilon_learning_rate && *epsilon_learning_rate < 0.0) {
    field_error("epsilon_learning_rate", "must be non-negative");
  }
  if (repeat_k) positive("repeat_k", *repeat_k);
  positive("ez_exponent", ez_exponent);
  if (ez_max_duration) positive("ez_max_duration", *ez_max_duration);
  positive("eval_every", double(eval_every));
  if (eval_episodes < 0) field_error("eval_episodes", "must be non-negative");
  positive("trace_every", double(trace_every));
  if (visitation_steps < 0) field_error("visitation_steps", "must be non-negative");
  positive("capacity", double(capacity));
}

std::string AgentConfig::to_text() const {
  std::string out;
  for (const Field& f : fields()) out += fmt::format("{} = {}\n", f.key, f.get(*this));
  return out;
}

AgentConfig AgentConfig::parse(const std::string& text) {
  AgentConfig c;
  std::stringstream ss(text);
  std::string line;
  int number_of_line = 0;
  while (std::getline(ss, line)) {
    ++number_of_line;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", number_of_line, line));
    }
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

AgentConfig AgentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

AgentConfig AgentConfig::from_sources(const std::optional<std::filesystem::path>& file,
                                      const std::vector<std::pair<std::string, std::string>>& overrides) {
  AgentConfig c = file ? load(*file) : AgentConfig{};
  for (const auto& [k, v] : overrides) c.set(k, v);
  c.validate();
  return c;
}

LearnerConfig learner_config(const AgentConfig& config, int obs_dim, const ActionBounds& bounds, Frame frame) {
  LearnerConfig l;
  l.obs_dim = obs_dim;
  l.bounds = bounds;
  l.frame = frame;
  l.plan_length = config.agent == "gpm" ? config.plan_length : 1;
  l.actor_hidden = config.hidden;
  l.critic_hidden = config.hidden;
  l.prior = config.prior;
  l.residual_scale = config.residual_scale;
  l.learning_rate = config.learning_rate;
  l.gamma = config.gamma;
  l.eta = config.eta;
  l.target_entropy = config.target_entropy;
  l.alpha_init = config.alpha_init;
  l.batch_size = config.batch_size;
  return l;
}

std::unique_ptr<Agent> make_agent(const AgentConfig& config, int obs_dim, const ActionBounds& bounds, Frame frame,
                                  Rng& init_rng) {
  config.validate();
  const LearnerConfig lc = learner_config(config, obs_dim, bounds, frame);
  if (config.agent == "gpm") {
    GpmOptions o;
    o.switch_state = replan::SwitchState::for_plan_length(config.plan_length, config.mode);
    o.switch_state.l_commit_target = config.resolved_l_commit_target();
    o.switch_state.l_commit_ema = o.switch_state.l_commit_target;
    o.switch_state.kappa = config.kappa;
    o.switch_state.ema_coeff = config.ema_coeff;
    o.switch_state.epsilon = config.epsilon_init;
    o.epsilon_learning_rate = config.resolved_epsilon_learning_rate();
    return std::make_unique<GpmAgent>(lc, o, init_rng);
  }
  baselines::BaselineOptions b;
  b.kind = baselines::parse_baseline(config.agent);
  b.repeat_k = config.agent == "far" ? config.repeat_k.value_or(config.plan_length) : 1;
  b.ez_exponent = config.ez_exponent;
  b.ez_max_duration = config.ez_max_duration.value_or(config.plan_length);
  return std::make_unique<baselines::SacAgent>(lc, b, init_rng);
}

}  // namespace planrl::harness
