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

#include "planrl/plangen/generator.hpp"

#include <cmath>
#include <numbers>

namespace planrl::plan {

using diff::Tape;
using diff::Var;

namespace {

constexpr double kInteriorMargin = 1e-12;

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string("non-finite ") + what);
}

}  // namespace

void GeneratorConfig::validate() const {
  if (obs_dim <= 0) throw ConfigError("generator: observation width must be positive");
  if (bounds.dim() <= 0 || bounds.high.size() != bounds.low.size()) {
    throw ConfigError("generator: action bounds are malformed");
  }
  if (!(bounds.high.array() > bounds.low.array()).all() || !bounds.low.allFinite() || !bounds.high.allFinite()) {
    throw ConfigError("generator: action bounds must be finite with low < high");
  }
  if (plan_length < 1) throw ConfigError("generator: plan length must be >= 1");
  if (hidden.empty()) throw ConfigError("generator: encoder needs at least one layer");
  if (log_std_min >= log_std_max) throw ConfigError("generator: log-std range is empty");
}

Var log_one_minus_tanh_sq(Tape& tape, Var u) {
  return ((-u) - tape.softplus(u * -2.0) + std::log(2.0)) * 2.0;
}

PlanGenerator::PlanGenerator(GeneratorConfig config, Rng& init_rng) : config_(std::move(config)) {
  config_.validate();
  const int A = config_.bounds.dim();
  const int K = config_.hidden.back();
  encoder_ = diff::Mlp(params_, "encoder", {config_.obs_dim, config_.hidden, diff::Activation::relu, diff::Activation::relu},
                       init_rng);
  mean_head_ = diff::Linear(params_, "mean", K, A, init_rng);
  log_std_head_ = diff::Linear(params_, "log_std", K, A, init_rng);
  init_head_ = diff::Linear(params_, "rnn_init", K, K, init_rng);
  const int rnn_input = config_.prior == DecoderPrior::linear ? 2 * A : A;
  rnn_ = diff::RecurrentCell(params_, "plan_rnn", {diff::CellKind::gru, rnn_input, K}, init_rng);
  residual_head_ = diff::Linear(params_, "residual", K, A, init_rng, /*zero_init=*/true);

  center_ = config_.bounds.center().transpose();
  half_range_ = config_.bounds.half_range().transpose();
  low_ = config_.bounds.low.transpose();
  high_ = config_.bounds.high.transpose();
}

Var PlanGenerator::squash(Tape& tape, Var u) const {
  return tape.tanh(u) * tape.constant(half_range_) + tape.constant(center_);
}

Var PlanGenerator::normalize(Tape& tape, Var action) const {
  return (action - tape.constant(center_)) * tape.constant(half_range_.cwiseInverse());
}

PlanGenerator::DecodeStep PlanGenerator::decode_next(Tape& tape, const diff::RecurrentState& hidden, Var prev,
                                                     Var before_prev, bool trainable,
                                                     const Matrix* recurrent_input) const {
  const bool linear = config_.prior == DecoderPrior::linear;
  Var delta;
  if (linear) {
    delta = before_prev.valid() ? prev - before_prev : tape.constant(Matrix::Zero(prev.rows(), prev.cols()));
  }

  Var rnn_in;
  if (recurrent_input != nullptr) {
    rnn_in = tape.constant(*recurrent_input);
  } else {
    Var prev_n = tape.detach(normalize(tape, prev));
    if (linear) {
      Var delta_n = tape.detach(delta * tape.constant(half_range_.cwiseInverse()));
      rnn_in = tape.concat_cols(std::vector<Var>{prev_n, delta_n});
    } else {
      rnn_in = prev_n;
    }
  }

  auto [state, out] = rnn_.step(tape, params_, hidden, rnn_in, trainable);
  Var g = residual_head_.forward(tape, params_, out, trainable) *
          tape.constant(RowVector(config_.residual_scale * half_range_));
  Var next = linear ? prev + delta + g : prev + g;
  next = tape.clamp(next, low_, high_);
  return {state, next};
}

PlanGenerator::Rollout PlanGenerator::rollout(Tape& tape, Var states, const Matrix& noise, bool trainable,
                                              std::span<const Matrix> recurrent_inputs) const {
  if (states.cols() != config_.obs_dim) {
    throw ConfigError("generator expects observation width " + std::to_string(config_.obs_dim) + ", got " +
                      std::to_string(states.cols()));
  }
  const int A = config_.bounds.dim();
  if (noise.rows() != states.rows() || noise.cols() != A) throw ConfigError("generator noise has the wrong shape");
  if (!recurrent_inputs.empty() && static_cast<int>(recurrent_inputs.size()) != config_.plan_length - 1) {
    throw ConfigError("recurrent input override needs L-1 entries");
  }

  Rollout r;
  Var z = encoder_.forward(tape, params_, states, trainable);
  r.mean = mean_head_.forward(tape, params_, z, trainable);
  r.log_std = tape.clamp(log_std_head_.forward(tape, params_, z, trainable), config_.log_std_min, config_.log_std_max);
  Var n = tape.constant(noise);
  Var u = r.mean + tape.exp(r.log_std) * n;
  r.actions.push_back(squash(tape, u));

  const double log_2pi = std::log(2.0 * std::numbers::pi);
  Matrix row_const = (-0.5 * noise.array().square()).rowwise().sum().matrix();
  row_const.array() -= A * 0.5 * log_2pi + half_range_.array().log().sum();
  r.log_prob = tape.row_sum(-r.log_std - log_one_minus_tanh_sq(tape, u)) + tape.constant(row_const);

  if (config_.plan_length > 1) {
    diff::RecurrentState hidden = rnn_.state_from(tape, init_head_.forward(tape, params_, z, trainable));
    Var before_prev;
    for (int i = 1; i < config_.plan_length; ++i) {
      const Matrix* override_in = recurrent_inputs.empty() ? nullptr : &recurrent_inputs[static_cast<std::size_t>(i - 1)];
      Var prev = r.actions.back();
      auto step = decode_next(tape, hidden, prev, before_prev, trainable, override_in);
      hidden = step.hidden;
      before_prev = prev;
      r.actions.push_back(step.action);
    }
  }
  return r;
}

std::vector<Matrix> PlanGenerator::recurrent_inputs(const Rollout& r) const {
  std::vector<Matrix> inputs;
  const auto normalized = [&](const Matrix& a) {
    return Matrix(((a.rowwise() - center_).array().rowwise() * half_range_.cwiseInverse().array()).matrix());
  };
  for (std::size_t i = 1; i < r.actions.size(); ++i) {
    const Matrix& prev = r.actions[i - 1].value();
    if (config_.prior == DecoderPrior::linear) {
      const Matrix delta = i >= 2 ? Matrix(prev - r.actions[i - 2].value()) : Matrix::Zero(prev.rows(), prev.cols());
      Matrix in(prev.rows(), 2 * prev.cols());
      in << normalized(prev), (delta.array().rowwise() * half_range_.cwiseInverse().array()).matrix();
      inputs.push_back(std::move(in));
    } else {
      inputs.push_back(normalized(prev));
    }
  }
  return inputs;
}

Matrix PlanGenerator::draw_noise(Eigen::Index batch, Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix n(batch, config_.bounds.dim());
  for (Eigen::Index r = 0; r < n.rows(); ++r) {
    for (Eigen::Index c = 0; c < n.cols(); ++c) n(r, c) = normal(rng);
  }
  return n;
}

PlanSample PlanGenerator::sample_plan(const Vector& state, Rng& rng) const {
  Tape tape(false);
  const Matrix noise = draw_noise(1, rng);
  Rollout r = rollout(tape, tape.constant(state.transpose()), noise, false);
  PlanSample s;
  s.plan.frame = config_.frame;
  for (const Var& a : r.actions) {
    require_finite(a.value(), "plan action");
    s.plan.actions.push_back(a.value().row(0).transpose());
  }
  s.first_step_log_prob = r.log_prob.scalar();
  if (!std::isfinite(s.first_step_log_prob)) throw NumericError("non-finite first-step log-probability");
  s.noise = noise.row(0).transpose();
  return s;
}

Plan PlanGenerator::mode_plan(const Vector& state) const {
  Tape tape(false);
  Rollout r = rollout(tape, tape.constant(state.transpose()), Matrix::Zero(1, config_.bounds.dim()), false);
  Plan p{{}, config_.frame};
  for (const Var& a : r.actions) {
    require_finite(a.value(), "plan action");
    p.actions.push_back(a.value().row(0).transpose());
  }
  return p;
}

double PlanGenerator::first_step_log_prob(const Vector& state, const Vector& action) const {
  const int A = config_.bounds.dim();
  if (action.size() != A) throw ConfigError("action has the wrong width");
  Tape tape(false);
  Var z = encoder_.forward(tape, params_, tape.constant(state.transpose()), false);
  const Matrix mean = mean_head_.forward(tape, params_, z, false).value();
  const Matrix log_std =
      log_std_head_.forward(tape, params_, z, false).value().cwiseMax(config_.log_std_min).cwiseMin(config_.log_std_max);
  double lp = 0.0;
  for (int d = 0; d < A; ++d) {
    double x = (action(d) - center_(d)) / half_range_(d);
    x = std::clamp(x, -1.0 + kInteriorMargin, 1.0 - kInteriorMargin);
    const double u = std::atanh(x);
    const double n = (u - mean(0, d)) / std::exp(log_std(0, d));
    const double log1m = 2.0 * (std::log(2.0) - u - std::log1p(std::exp(-2.0 * u)));
    lp += -0.5 * n * n - log_std(0, d) - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(half_range_(d)) - log1m;
  }
  return lp;
}

Var PlanGenerator::actor_loss(Tape& tape, const Matrix& states, const PlanValueFunction& critic, double alpha,
                              const Matrix& noise, double* mean_log_prob) const {
  Var s = tape.constant(states);
  Rollout r = rollout(tape, s, noise, true);
  if (mean_log_prob != nullptr) *mean_log_prob = r.log_prob.value().mean();
  Var values = critic.min_values(tape, s, r.actions, false);
  if (values.cols() != config_.plan_length || values.rows() != states.rows()) {
    throw ConfigError("critic returned values of the wrong shape");
  }
  Var loss = tape.mean(r.log_prob) * alpha - tape.mean(values);
  if (!std::isfinite(loss.scalar())) throw NumericError("non-finite actor loss");
  return loss;
}

}  // namespace planrl::plan
