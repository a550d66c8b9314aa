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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "planrl/common.hpp"

namespace planrl::replay {

/// One environment step as stored for learning.
///
/// For ego-setpoint tasks `action` is the executed setpoint in world
/// coordinates and `origin` is the agent's world position at `state`; raw
/// tasks leave `origin` empty.
struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  TerminalKind terminal = TerminalKind::none;
  std::uint64_t episode_id = 0;
  std::uint64_t step_index = 0;
  Vector origin;
};

/// Batch of sub-plans for plan-value learning, stored column-wise.
///
/// Item i covers actions[0..lengths[i]) starting at states.row(i). Entries of
/// `actions` past an item's length repeat its last valid action; `rewards` is
/// zero there. `next_states.row(i)` is the state after the last plan action.
struct SampledPlanBatch {
  Matrix states;
  std::vector<Matrix> actions;  // max length entries, each B x A
  std::vector<int> lengths;
  Matrix rewards;               // B x max length
  Matrix next_states;
  std::vector<std::uint8_t> bootstrap;  // 0 only when the plan ends at a true terminal
  // Anchor positions (oldest = 0) in the buffer, for diagnostics.
  std::vector<std::size_t> anchors;

  int size() const { return static_cast<int>(lengths.size()); }
  int max_length() const { return static_cast<int>(actions.size()); }
};

/// Ring buffer of transitions with sub-plan sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1'000'000, Frame frame = Frame::raw);

  void push(Transition t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  Frame frame() const { return frame_; }
  bool empty() const { return size_ == 0; }
  std::uint64_t total_pushed() const { return pushed_; }

  // Logical index, 0 = oldest.
  const Transition& at(std::size_t i) const;

  /// Uniform anchors, l ~ U{1..L} truncated at the end of the stored episode.
  /// The length draw is skipped when L == 1, making this consume exactly the
  /// same random numbers as sample_transitions.
  SampledPlanBatch sample_plan_batch(int batch_size, int max_plan_length, Rng& rng) const;

  /// Single-step batch (the plain off-policy sampling path).
  SampledPlanBatch sample_transitions(int batch_size, Rng& rng) const;

  void save(const std::filesystem::path& path) const;
  static ReplayBuffer load(const std::filesystem::path& path);

 private:
  std::size_t physical(std::size_t logical) const;
  // Number of consecutive same-episode transitions available from `anchor`,
  // capped at `want`.
  int available_length(std::size_t anchor, int want) const;
  SampledPlanBatch assemble(const std::vector<std::size_t>& anchors, const std::vector<int>& lengths) const;

  std::size_t capacity_;
  Frame frame_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
  std::uint64_t pushed_ = 0;
};

}  // namespace planrl::replay
