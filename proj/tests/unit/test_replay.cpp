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

#include <boost/math/distributions/chi_squared.hpp>
#include <filesystem>

#include "planrl/replay/buffer.hpp"

using namespace planrl;
using namespace planrl::replay;

namespace {

Transition step(std::uint64_t episode, std::uint64_t index, double reward = 0.0,
                TerminalKind kind = TerminalKind::none) {
  Transition t;
  t.state = Vector::Constant(2, double(index));
  t.action = Vector::Constant(1, double(index) + 0.5);
  t.reward = reward;
  t.next_state = Vector::Constant(2, double(index + 1));
  t.terminal = kind;
  t.episode_id = episode;
  t.step_index = index;
  return t;
}

// Episodes of the given lengths; the last step of each ends with `kind`.
ReplayBuffer episodes(const std::vector<int>& lengths, TerminalKind kind, std::size_t capacity = 1 << 20) {
  ReplayBuffer b(capacity);
  for (std::size_t e = 0; e < lengths.size(); ++e) {
    for (int t = 0; t < lengths[e]; ++t) {
      b.push(step(e, std::uint64_t(t), 10.0 * e + t, t + 1 == lengths[e] ? kind : TerminalKind::none));
    }
  }
  return b;
}

}  // namespace

TEST_CASE("replay: ring eviction") {
  ReplayBuffer b(2);
  b.push(step(0, 0));
  b.push(step(0, 1));
  b.push(step(0, 2));
  CHECK(b.size() == 2);
  CHECK(b.total_pushed() == 3);
  CHECK(b.at(0).step_index == 1);
  CHECK(b.at(1).step_index == 2);
  CHECK_THROWS_AS(b.at(2), UsageError);
}

TEST_CASE("replay: empty buffer and bad arguments") {
  ReplayBuffer b(4);
  Rng rng(1);
  CHECK_THROWS_AS(b.sample_plan_batch(4, 3, rng), UsageError);
  CHECK_THROWS_AS(b.sample_transitions(4, rng), UsageError);
  CHECK_THROWS_AS(ReplayBuffer(0), ConfigError);
  b.push(step(0, 0));
  CHECK_THROWS_AS(b.sample_plan_batch(0, 3, rng), UsageError);
  Transition wide = step(0, 1);
  wide.state = Vector::Zero(5);
  CHECK_THROWS_AS(b.push(wide), ConfigError);
}

TEST_CASE("replay: truncation before a true terminal") {
  // Single episode of 10 steps ending in a true terminal; anchor 2 steps
  // before the end is index 8.
  ReplayBuffer b = episodes({10}, TerminalKind::terminal);
  Rng rng(2);
  int seen_full = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto batch = b.sample_plan_batch(1, 5, rng);
    if (batch.anchors[0] != 8) continue;
    const int l = batch.lengths[0];
    CHECK(l <= 2);
    if (l == 2) {
      ++seen_full;
      CHECK(batch.bootstrap[0] == 0);
      CHECK(batch.next_states(0, 0) == 10.0);
    } else {
      CHECK(batch.bootstrap[0] == 1);
    }
  }
  CHECK(seen_full > 0);
}

TEST_CASE("replay: timeout plan ends bootstrap") {
  ReplayBuffer b = episodes({3}, TerminalKind::timeout);
  Rng rng(3);
  const auto batch = b.sample_plan_batch(200, 4, rng);
  for (int i = 0; i < batch.size(); ++i) CHECK(batch.bootstrap[static_cast<std::size_t>(i)] == 1);
}

TEST_CASE("replay: L=1 reduces to single-transition sampling") {
  ReplayBuffer b = episodes({7, 5, 9}, TerminalKind::timeout);
  Rng r1(4), r2(4);
  const auto plans = b.sample_plan_batch(64, 1, r1);
  const auto plain = b.sample_transitions(64, r2);
  CHECK(plans.anchors == plain.anchors);
  CHECK(plans.max_length() == 1);
  CHECK(plans.states == plain.states);
  CHECK(plans.actions[0] == plain.actions[0]);
  CHECK(plans.rewards == plain.rewards);
  for (int l : plans.lengths) CHECK(l == 1);
  CHECK(r1() == r2());
}

TEST_CASE("replay: plans stay within one episode with aligned rewards") {
  Rng rng(5);
  std::uniform_int_distribution<int> len(1, 12);
  std::vector<int> lengths;
  for (int e = 0; e < 300; ++e) lengths.push_back(len(rng));
  // Small capacity forces wrap-around with a partial oldest episode.
  ReplayBuffer b = episodes(lengths, TerminalKind::terminal, 1000);
  const int L = 6;
  for (int rep = 0; rep < 200; ++rep) {
    const auto batch = b.sample_plan_batch(500, L, rng);
    for (int i = 0; i < batch.size(); ++i) {
      const std::size_t anchor = batch.anchors[static_cast<std::size_t>(i)];
      const int l = batch.lengths[static_cast<std::size_t>(i)];
      REQUIRE(l >= 1);
      REQUIRE(l <= L);
      const Transition& first = b.at(anchor);
      for (int k = 0; k < l; ++k) {
        const Transition& t = b.at(anchor + static_cast<std::size_t>(k));
        REQUIRE(t.episode_id == first.episode_id);
        REQUIRE(t.step_index == first.step_index + static_cast<std::uint64_t>(k));
        REQUIRE(batch.rewards(i, k) == t.reward);
        REQUIRE(batch.actions[static_cast<std::size_t>(k)](i, 0) == t.action(0));
      }
      for (int k = l; k < batch.max_length(); ++k) {
        REQUIRE(batch.rewards(i, k) == 0.0);
        REQUIRE(batch.actions[static_cast<std::size_t>(k)](i, 0) ==
                batch.actions[static_cast<std::size_t>(l - 1)](i, 0));
      }
    }
  }
}

TEST_CASE("replay: mid-episode plan lengths are uniform") {
  const int L = 5;
  ReplayBuffer b = episodes({100000}, TerminalKind::timeout);
  Rng rng(6);
  std::vector<double> counts(L, 0.0);
  int n = 0;
  while (n < 100000) {
    const auto batch = b.sample_plan_batch(1000, L, rng);
    for (int i = 0; i < batch.size() && n < 100000; ++i) {
      if (batch.anchors[static_cast<std::size_t>(i)] + L > b.size()) continue;
      counts[static_cast<std::size_t>(batch.lengths[static_cast<std::size_t>(i)] - 1)] += 1.0;
      ++n;
    }
  }
  const double expected = n / double(L);
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(L - 1), stat));
  CHECK(p > 0.01);
}

TEST_CASE("replay: ego-frame plans are re-expressed at the anchor") {
  ReplayBuffer b(16, Frame::ego_setpoint);
  for (int t = 0; t < 3; ++t) {
    Transition tr;
    tr.state = Vector::Zero(2);
    tr.origin = Vector(2);
    tr.origin << t, 2.0 * t;  // world position at the step
    tr.action = Vector(2);
    tr.action << t + 1.0, 5.0;  // world setpoint
    tr.next_state = Vector::Zero(2);
    tr.episode_id = 0;
    tr.step_index = std::uint64_t(t);
    b.push(tr);
  }
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto batch = b.sample_plan_batch(1, 3, rng);
    const int anchor = static_cast<int>(batch.anchors[0]);
    for (int k = 0; k < batch.lengths[0]; ++k) {
      CHECK(batch.actions[static_cast<std::size_t>(k)](0, 0) == (anchor + k + 1.0) - anchor);
      CHECK(batch.actions[static_cast<std::size_t>(k)](0, 1) == 5.0 - 2.0 * anchor);
    }
  }
}

TEST_CASE("replay: snapshot round trip") {
  ReplayBuffer b = episodes({4, 3}, TerminalKind::terminal, 5);
  const auto path = std::filesystem::temp_directory_path() / "planrl_replay_roundtrip.bin";
  b.save(path);
  const ReplayBuffer c = ReplayBuffer::load(path);
  REQUIRE(c.size() == b.size());
  CHECK(c.capacity() == b.capacity());
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(c.at(i).state == b.at(i).state);
    CHECK(c.at(i).action == b.at(i).action);
    CHECK(c.at(i).reward == b.at(i).reward);
    CHECK(c.at(i).terminal == b.at(i).terminal);
    CHECK(c.at(i).episode_id == b.at(i).episode_id);
    CHECK(c.at(i).step_index == b.at(i).step_index);
  }
  Rng r1(8), r2(8);
  CHECK(b.sample_plan_batch(16, 3, r1).rewards == c.sample_plan_batch(16, 3, r2).rewards);
  std::filesystem::remove(path);
}
