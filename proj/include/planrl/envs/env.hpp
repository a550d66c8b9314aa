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

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "planrl/common.hpp"

namespace planrl::env {

struct EnvSpec {
  std::string name;
  int obs_dim = 0;
  ActionBounds bounds;
  int max_steps = 1;
  double dt = 0.0;
  Frame frame = Frame::raw;
  // Width of position() (visitation logging and ego origins).
  int position_dim = 1;

  int action_dim() const { return bounds.dim(); }
};

struct StepResult {
  Vector observation;
  double reward = 0.0;
  TerminalKind terminal = TerminalKind::none;
  Vector position;

  bool done() const { return terminal != TerminalKind::none; }
};

class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual Vector reset(std::uint64_t seed) = 0;
  /// Actions outside the bounds are clipped.
  virtual StepResult step(const Vector& action) = 0;
  virtual Vector observation() const = 0;
  virtual Vector position() const = 0;
  virtual std::unique_ptr<Env> clone() const = 0;
  int steps() const { return steps_; }

 protected:
  int steps_ = 0;
};

/// Gym Pendulum-v0 swing-up. State (theta, theta_dot), theta = 0 upright.
/// Observation (cos theta, sin theta, theta_dot); torque in [-2, 2].
class Pendulum : public Env {
 public:
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kDt = 0.05;
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr int kSubsteps = 4;  // RK4 substeps per control step

  Pendulum();
  const EnvSpec& spec() const override { return spec_; }
  Vector reset(std::uint64_t seed) override;
  StepResult step(const Vector& action) override;
  Vector observation() const override;
  Vector position() const override;
  std::unique_ptr<Env> clone() const override { return std::make_unique<Pendulum>(*this); }

  void set_state(double theta, double theta_dot);
  double theta() const { return theta_; }
  double theta_dot() const { return theta_dot_; }
  /// Rod energy: kinetic (m l^2 / 6) w^2 plus potential (m g l / 2) cos theta.
  static double energy(double theta, double theta_dot);
  /// One zero-damping control step of the integrator, without speed clipping.
  static std::array<double, 2> integrate(double theta, double theta_dot, double torque, double dt);

 private:
  EnvSpec spec_;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
};

/// Gym MountainCarContinuous-v0. +100 at the goal (a true terminal) and
/// -cost * force^2 per step.
class MountainCar : public Env {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.45;
  static constexpr double kPower = 0.0015;

  explicit MountainCar(double action_cost = 0.1, int max_steps = 999);
  const EnvSpec& spec() const override { return spec_; }
  Vector reset(std::uint64_t seed) override;
  StepResult step(const Vector& action) override;
  Vector observation() const override;
  Vector position() const override;
  std::unique_ptr<Env> clone() const override { return std::make_unique<MountainCar>(*this); }

  void set_state(double position, double velocity);
  double action_cost() const { return action_cost_; }

 private:
  EnvSpec spec_;
  double action_cost_;
  double position_ = -0.5;
  double velocity_ = 0.0;
};

/// ã = a * max(|a| - delta, 0) / |a|.
Vector shrink_setpoint(const Vector& a, double delta);

/// Planar point mass commanded by ego-frame setpoints and rewarded for
/// progress along the route (0,0) -> (10,0) -> (10,10).
///
/// Each step the shrunk setpoint ã sets a desired velocity ã / kReach capped
/// at kMaxSpeed; the velocity follows it with first-order lag kLag. Reaching
/// the goal within kGoalRadius below kStopSpeed pays kSuccessBonus and ends
/// the episode.
class PointMass : public Env {
 public:
  static constexpr double kDt = 0.05;
  static constexpr double kDelta = 3.0;
  static constexpr double kSetpointLimit = 8.0;
  static constexpr double kReach = 1.0;
  static constexpr double kMaxSpeed = 4.0;
  static constexpr double kLag = 0.2;
  static constexpr double kGoalRadius = 0.5;
  static constexpr double kStopSpeed = 0.25;
  static constexpr double kSuccessBonus = 10.0;
  static constexpr double kWorldMin = -5.0;
  static constexpr double kWorldMax = 15.0;

  explicit PointMass(int max_steps = 400);
  const EnvSpec& spec() const override { return spec_; }
  Vector reset(std::uint64_t seed) override;
  StepResult step(const Vector& action) override;
  Vector observation() const override;
  Vector position() const override { return position_; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<PointMass>(*this); }

  void set_state(const Vector& position, const Vector& velocity);
  const Vector& velocity() const { return velocity_; }

  /// Arc length of the closest route point.
  static double route_progress(const Vector& p);
  static double route_length() { return 20.0; }
  static Vector goal();

 private:
  EnvSpec spec_;
  Vector position_;
  Vector velocity_;
};

/// "pendulum", "mountaincar", "pointmass".
std::unique_ptr<Env> make_env(const std::string& name);

/// Trajectory CSV: episode,step,obs_0..,action_0..,reward,terminal.
class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::filesystem::path& path, int obs_dim, int action_dim);
  void write(std::uint64_t episode, int step, const Vector& obs, const Vector& action, double reward,
             TerminalKind terminal);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

std::string to_string(TerminalKind kind);

}  // namespace planrl::env
