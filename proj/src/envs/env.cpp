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

#include "planrl/envs/env.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>

namespace planrl::env {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_normalize(double x) { return std::fmod(std::fmod(x + kPi, 2 * kPi) + 2 * kPi, 2 * kPi) - kPi; }

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NumericError(std::string("non-finite ") + what);
}

}  // namespace

// ---------------------------------------------------------------- Pendulum

Pendulum::Pendulum() {
  spec_.name = "pendulum";
  spec_.obs_dim = 3;
  spec_.bounds = ActionBounds::symmetric(1, kMaxTorque);
  spec_.max_steps = 200;
  spec_.dt = kDt;
  spec_.position_dim = 2;
}

Vector Pendulum::reset(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> speed(-1.0, 1.0);
  theta_ = angle(rng);
  theta_dot_ = speed(rng);
  steps_ = 0;
  return observation();
}

double Pendulum::energy(double theta, double theta_dot) {
  return kMass * kLength * kLength * theta_dot * theta_dot / 6.0 + 0.5 * kMass * kGravity * kLength * std::cos(theta);
}

std::array<double, 2> Pendulum::integrate(double theta, double theta_dot, double torque, double dt) {
  const auto accel = [torque](double th) {
    return 3.0 * kGravity / (2.0 * kLength) * std::sin(th) + 3.0 / (kMass * kLength * kLength) * torque;
  };
  const double h = dt / kSubsteps;
  for (int i = 0; i < kSubsteps; ++i) {
    const double k1x = theta_dot, k1v = accel(theta);
    const double k2x = theta_dot + 0.5 * h * k1v, k2v = accel(theta + 0.5 * h * k1x);
    const double k3x = theta_dot + 0.5 * h * k2v, k3v = accel(theta + 0.5 * h * k2x);
    const double k4x = theta_dot + h * k3v, k4v = accel(theta + h * k3x);
    theta += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    theta_dot += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return {theta, theta_dot};
}

StepResult Pendulum::step(const Vector& action) {
  if (action.size() != 1) throw ConfigError("pendulum takes a 1-d torque");
  const double u = clip(action(0), -kMaxTorque, kMaxTorque);
  const double cost = std::pow(angle_normalize(theta_), 2) + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;
  const auto [th, thdot] = integrate(theta_, theta_dot_, u, kDt);
  theta_ = th;
  theta_dot_ = clip(thdot, -kMaxSpeed, kMaxSpeed);
  ++steps_;
  StepResult r;
  r.observation = observation();
  r.reward = -cost;
  r.terminal = steps_ >= spec_.max_steps ? TerminalKind::timeout : TerminalKind::none;
  r.position = position();
  require_finite(r.observation, "pendulum state");
  return r;
}

Vector Pendulum::observation() const {
  Vector o(3);
  o << std::cos(theta_), std::sin(theta_), theta_dot_;
  return o;
}

Vector Pendulum::position() const {
  Vector p(2);
  p << angle_normalize(theta_), theta_dot_;
  return p;
}

void Pendulum::set_state(double theta, double theta_dot) {
  theta_ = theta;
  theta_dot_ = theta_dot;
}

// ------------------------------------------------------------- MountainCar

MountainCar::MountainCar(double action_cost, int max_steps) : action_cost_(action_cost) {
  if (max_steps < 1) throw ConfigError("max steps must be >= 1");
  if (action_cost < 0.0) throw ConfigError("action cost must be non-negative");
  spec_.name = "mountaincar";
  spec_.obs_dim = 2;
  spec_.bounds = ActionBounds::symmetric(1, 1.0);
  spec_.max_steps = max_steps;
  spec_.position_dim = 1;
}

Vector MountainCar::reset(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> start(-0.6, -0.4);
  position_ = start(rng);
  velocity_ = 0.0;
  steps_ = 0;
  return observation();
}

StepResult MountainCar::step(const Vector& action) {
  if (action.size() != 1) throw ConfigError("mountain car takes a 1-d force");
  const double force = clip(action(0), -1.0, 1.0);
  velocity_ += force * kPower - 0.0025 * std::cos(3.0 * position_);
  velocity_ = clip(velocity_, -kMaxSpeed, kMaxSpeed);
  position_ += velocity_;
  position_ = clip(position_, kMinPosition, kMaxPosition);
  if (position_ == kMinPosition && velocity_ < 0.0) velocity_ = 0.0;
  ++steps_;

  const bool goal = position_ >= kGoalPosition && velocity_ >= 0.0;
  StepResult r;
  r.observation = observation();
  r.reward = -action_cost_ * force * force + (goal ? 100.0 : 0.0);
  r.terminal = goal ? TerminalKind::terminal
                    : (steps_ >= spec_.max_steps ? TerminalKind::timeout : TerminalKind::none);
  r.position = position();
  return r;
}

Vector MountainCar::observation() const {
  Vector o(2);
  o << position_, velocity_;
  return o;
}

Vector MountainCar::position() const { return Vector::Constant(1, position_); }

void MountainCar::set_state(double position, double velocity) {
  position_ = position;
  velocity_ = velocity;
}

// --------------------------------------------------------------- PointMass

Vector shrink_setpoint(const Vector& a, double delta) {
  const double norm = a.norm();
  if (norm <= delta) return Vector::Zero(a.size());
  return a * ((norm - delta) / norm);
}

PointMass::PointMass(int max_steps) : position_(Vector::Zero(2)), velocity_(Vector::Zero(2)) {
  if (max_steps < 1) throw ConfigError("max steps must be >= 1");
  spec_.name = "pointmass";
  spec_.obs_dim = 4;
  spec_.bounds = ActionBounds::symmetric(2, kSetpointLimit);
  spec_.max_steps = max_steps;
  spec_.dt = kDt;
  spec_.frame = Frame::ego_setpoint;
  spec_.position_dim = 2;
}

Vector PointMass::goal() {
  Vector g(2);
  g << 10.0, 10.0;
  return g;
}

double PointMass::route_progress(const Vector& p) {
  // Segments (0,0)-(10,0) and (10,0)-(10,10).
  const double s1 = clip(p(0), 0.0, 10.0);
  const double d1 = std::hypot(p(0) - s1, p(1));
  const double s2 = clip(p(1), 0.0, 10.0);
  const double d2 = std::hypot(p(0) - 10.0, p(1) - s2);
  return d1 <= d2 ? s1 : 10.0 + s2;
}

Vector PointMass::reset(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  position_ = Vector(2);
  position_ << jitter(rng), jitter(rng);
  velocity_ = Vector::Zero(2);
  steps_ = 0;
  return observation();
}

StepResult PointMass::step(const Vector& action) {
  if (action.size() != 2) throw ConfigError("point mass takes a 2-d setpoint");
  const Vector a = action.cwiseMax(-kSetpointLimit).cwiseMin(kSetpointLimit);
  const Vector target = shrink_setpoint(a, kDelta);
  Vector desired = target / kReach;
  const double speed = desired.norm();
  if (speed > kMaxSpeed) desired *= kMaxSpeed / speed;
  const double before = route_progress(position_);
  velocity_ += (desired - velocity_) * std::min(1.0, kDt / kLag);
  position_ += velocity_ * kDt;
  for (int d = 0; d < 2; ++d) {
    if (position_(d) < kWorldMin || position_(d) > kWorldMax) {
      position_(d) = clip(position_(d), kWorldMin, kWorldMax);
      velocity_(d) = 0.0;
    }
  }
  ++steps_;

  StepResult r;
  r.reward = route_progress(position_) - before;
  const bool success = (position_ - goal()).norm() < kGoalRadius && velocity_.norm() < kStopSpeed;
  if (success) r.reward += kSuccessBonus;
  r.terminal = success ? TerminalKind::terminal
                       : (steps_ >= spec_.max_steps ? TerminalKind::timeout : TerminalKind::none);
  r.observation = observation();
  r.position = position_;
  require_finite(r.observation, "point mass state");
  return r;
}

Vector PointMass::observation() const {
  Vector o(4);
  o << position_ / 10.0, velocity_ / kMaxSpeed;
  return o;
}

void PointMass::set_state(const Vector& position, const Vector& velocity) {
  position_ = position;
  velocity_ = velocity;
}

// ----------------------------------------------------------------- factory

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "mountaincar") return std::make_unique<MountainCar>();
  if (name == "pointmass") return std::make_unique<PointMass>();
  throw ConfigError("unknown task '" + name + "' (pendulum|mountaincar|pointmass)");
}

std::string to_string(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::none: return "none";
    case TerminalKind::timeout: return "timeout";
    case TerminalKind::terminal: return "terminal";
  }
  return "none";
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path, int obs_dim, int action_dim) : out_(path) {
  if (!out_) throw UsageError("cannot open " + path.string());
  out_ << "episode,step";
  for (int i = 0; i < obs_dim; ++i) out_ << ",obs_" << i;
  for (int i = 0; i < action_dim; ++i) out_ << ",action_" << i;
  out_ << ",reward,terminal\n";
  out_ << std::setprecision(17);
}

void TrajectoryWriter::write(std::uint64_t episode, int step, const Vector& obs, const Vector& action, double reward,
                             TerminalKind terminal) {
  out_ << episode << ',' << step;
  for (Eigen::Index i = 0; i < obs.size(); ++i) out_ << ',' << obs(i);
  for (Eigen::Index i = 0; i < action.size(); ++i) out_ << ',' << action(i);
  out_ << ',' << reward << ',' << to_string(terminal) << '\n';
}

}  // namespace planrl::env
