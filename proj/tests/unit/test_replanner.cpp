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

#include <doctest.h>

#include <cmath>

#include "planrl/replanner/replanner.hpp"

using namespace planrl;
using namespace planrl::replan;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Plan raw_plan(std::initializer_list<double> xs) {
  Plan p;
  for (double x : xs) p.actions.push_back(v1(x));
  return p;
}

Plan full_plan(int L, double x) {
  Plan p;
  for (int i = 0; i < L; ++i) p.actions.push_back(v1(x));
  return p;
}

// Values every prefix by the sum of its actions.
double sum_value(const Vector&, const Plan& plan, std::size_t l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l; ++i) s += plan[i](0);
  return s;
}

}  // namespace

TEST_CASE("omega and rho on raw plans") {
  const Plan p = raw_plan({1.0, 2.0, 3.0});
  CHECK(omega(p) == v1(1.0));
  CHECK(omega(raw_plan({7.0})) == v1(7.0));
  CHECK(rho(p) == raw_plan({2.0, 3.0}));
  CHECK(omega(rho(raw_plan({1.0, 2.0}))) == v1(2.0));
  CHECK(rho(raw_plan({4.0})).empty());
  CHECK(rho(Plan{}).empty());
  CHECK_THROWS_AS(omega(Plan{}), UsageError);
}

TEST_CASE("rho on ego setpoints translates the remainder") {
  Plan p{{v2(1, 0), v2(2, 0)}, Frame::ego_setpoint};
  const Plan q = rho(p, v2(0, 0), v2(1, 0));
  REQUIRE(q.size() == 1);
  CHECK(q[0] == v2(1, 0));
  CHECK(q.frame == Frame::ego_setpoint);

  Rng rng(1);
  std::normal_distribution<double> n(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    Plan r{{}, Frame::ego_setpoint};
    for (int i = 0; i < 5; ++i) r.actions.push_back(v2(n(rng), n(rng)));
    const Vector origin = v2(n(rng), n(rng));
    const Plan back = to_ego(to_world(r, origin), origin);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK((back[i] - r[i]).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("switch probability arithmetic and monotonicity") {
  CHECK(switch_probability(0.0, 0.0, 1.0) == 0.5);
  CHECK(switch_probability(0.0, 2.0, 1.0) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-15));
  CHECK(switch_probability(0.0, 2.0, 1.0) == doctest::Approx(0.1192).epsilon(1e-3));
  double prev = 0.0;
  for (double gap = -5.0; gap <= 5.0; gap += 0.25) {
    const double p = switch_probability(gap, 1.0, 1.0);
    CHECK(p > prev);
    prev = p;
  }
  prev = 1.0;
  for (double eps = 0.0; eps <= 6.0; eps += 0.25) {
    const double p = switch_probability(0.3, eps, 1.0);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("decide_switch: empty old plan forces a switch") {
  SwitchState s;
  s.epsilon = 100.0;
  Rng rng(2);
  for (Mode m : {Mode::standard, Mode::commit, Mode::mpc}) {
    s.mode = m;
    const auto d = decide_switch(v1(0), Plan{}, full_plan(3, 0.1), sum_value, s, rng);
    CHECK(d.switched);
  }
}

TEST_CASE("decide_switch: empirical rate follows the categorical") {
  SwitchState s;
  s.epsilon = 2.0;
  Rng rng(3);
  const Plan old_plan = raw_plan({0.5, 0.5});
  const Plan new_plan = full_plan(3, 0.5);  // equal prefix values: gap 0
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += decide_switch(v1(0), old_plan, new_plan, sum_value, s, rng).switched;
  const double p = 1.0 / (1.0 + std::exp(2.0));
  CHECK(std::abs(double(hits) / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));

  SUBCASE("greedy mode switches iff the gap exceeds eps") {
    CHECK_FALSE(decide_switch(v1(0), old_plan, full_plan(3, 1.4), sum_value, s, rng, true).switched);
    CHECK(decide_switch(v1(0), old_plan, full_plan(3, 1.6), sum_value, s, rng, true).switched);
  }
  SUBCASE("modes") {
    s.mode = Mode::commit;
    CHECK_FALSE(decide_switch(v1(0), old_plan, full_plan(3, 99.0), sum_value, s, rng).switched);
    s.mode = Mode::mpc;
    CHECK(decide_switch(v1(0), old_plan, full_plan(3, -99.0), sum_value, s, rng).switched);
  }
  SUBCASE("gap uses the prefix of the old plan's length") {
    const Plan fresh = raw_plan({1.0, 1.0, 50.0});
    const auto d = decide_switch(v1(0), old_plan, fresh, sum_value, s, rng);
    CHECK(d.gap == 1.0);
  }
}

TEST_CASE("update_epsilon and record_commitment arithmetic") {
  SwitchState s;
  s.epsilon = 1.0;
  s.l_commit_ema = 3.0;
  s.l_commit_target = 1.5;
  update_epsilon(s, 0.1);
  CHECK(s.epsilon == doctest::Approx(0.85).epsilon(1e-15));
  s.l_commit_ema = 1.5;
  update_epsilon(s, 0.1);
  CHECK(s.epsilon == doctest::Approx(0.85).epsilon(1e-15));
  s.l_commit_ema = 100.0;
  update_epsilon(s, 0.1);
  CHECK(s.epsilon == 0.0);

  SwitchState e;
  e.ema_coeff = 0.0;
  e.l_commit_ema = 9.0;
  record_commitment(e, 3);
  CHECK(e.l_commit_ema == 3.0);
  e.ema_coeff = 0.5;
  e.l_commit_ema = 2.0;
  record_commitment(e, 6);
  CHECK(e.l_commit_ema == 4.0);
  e.ema_coeff = 0.95;
  for (int i = 0; i < 2000; ++i) record_commitment(e, 4);
  CHECK(e.l_commit_ema == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(record_commitment(e, 0), UsageError);

  SUBCASE("control direction") {
    SwitchState c = SwitchState::for_plan_length(3);
    CHECK(c.l_commit_target == 1.5);
    c.l_commit_ema = 2.5;
    double prev = c.epsilon;
    for (int i = 0; i < 50; ++i) {
      update_epsilon(c, 0.01);
      CHECK(c.epsilon <= prev);
      CHECK(c.epsilon >= 0.0);
      prev = c.epsilon;
    }
    c.l_commit_ema = 1.0;
    for (int i = 0; i < 50; ++i) {
      update_epsilon(c, 0.01);
      CHECK(c.epsilon >= prev);
      prev = c.epsilon;
    }
  }
}

TEST_CASE("replanner: mode extremes and consumption bound") {
  const int L = 4;
  Rng rng(4);
  auto run = [&](Mode mode, int steps) {
    Replanner r(SwitchState::for_plan_length(L, mode));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < steps; ++t) {
      Plan fresh;
      for (int i = 0; i < L; ++i) fresh.actions.push_back(v1(u(rng)));
      const Vector a = r.act(v1(0), fresh, sum_value, rng);
      CHECK(a == r.current()[0]);
      CHECK(r.cursor().steps_committed <= L);
      CHECK(r.cursor().steps_committed >= 1);
      r.advance();
    }
    r.end_episode();
    return r;
  };
  const Replanner mpc = run(Mode::mpc, 40);
  CHECK(mpc.stats().mean_completed() == 1.0);
  CHECK(mpc.stats().completed == 39);
  const Replanner commit = run(Mode::commit, 40);
  CHECK(commit.stats().mean_completed() == double(L));
  CHECK(commit.stats().completed == 9);
  const Replanner standard = run(Mode::standard, 400);
  CHECK(standard.stats().mean_completed() > 1.0);
  CHECK(standard.stats().mean_completed() < double(L));
}

TEST_CASE("replanner: committed steps replay the adopted plan") {
  SwitchState s = SwitchState::for_plan_length(3, Mode::commit);
  Replanner r(s);
  Rng rng(5);
  const Plan first = raw_plan({0.1, 0.2, 0.3});
  CHECK(r.act(v1(0), first, sum_value, rng) == v1(0.1));
  r.advance();
  CHECK(r.act(v1(0), raw_plan({9, 9, 9}), sum_value, rng) == v1(0.2));
  r.advance();
  CHECK(r.act(v1(0), raw_plan({9, 9, 9}), sum_value, rng) == v1(0.3));
  r.advance();
  CHECK(r.act(v1(0), raw_plan({0.7, 0.8, 0.9}), sum_value, rng) == v1(0.7));
  CHECK(r.switch_state().l_commit_ema == doctest::Approx(0.95 * 1.5 + 0.05 * 3));
  r.advance();
  r.end_episode();
  CHECK(r.stats().truncated == 1);
  CHECK(r.stats().truncated_steps == 1);
  CHECK(r.cursor().remaining.empty());
  CHECK(r.cursor().steps_committed == 0);
}

TEST_CASE("replanner: ego plans are re-expressed as the agent moves") {
  Replanner r(SwitchState::for_plan_length(3, Mode::commit));
  Rng rng(6);
  Plan p{{v2(1, 0), v2(2, 0), v2(3, 1)}, Frame::ego_setpoint};
  r.act(v2(0, 0), p, sum_value, rng);
  r.advance(v2(0, 0), v2(1, 0));
  const Vector a = r.act(v2(0, 0), p, sum_value, rng);
  CHECK(a == v2(1, 0));
  r.advance(v2(1, 0), v2(1.5, 0.5));
  CHECK(r.cursor().remaining[0] == v2(1.5, 0.5));
}

TEST_CASE("mode names") {
  CHECK(parse_mode("commit") == Mode::commit);
  CHECK(to_string(Mode::mpc) == "mpc");
  CHECK_THROWS_AS(parse_mode("greedy"), ConfigError);
}
