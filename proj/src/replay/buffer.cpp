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

#include "planrl/replay/buffer.hpp"

#include <fstream>

#include "planrl/binary_io.hpp"

namespace planrl::replay {

namespace {

constexpr std::uint32_t kMagic = 0x42524c50;  // "PLRB"
constexpr std::uint32_t kVersion = 1;

void put_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) io::put_f64(out, v(i));
}

Vector get_vector(std::istream& in, std::uint32_t n) {
  Vector v(n);
  for (std::uint32_t i = 0; i < n; ++i) v(i) = io::get_f64(in);
  return v;
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, Frame frame) : capacity_(capacity), frame_(frame) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

std::size_t ReplayBuffer::physical(std::size_t logical) const {
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return (oldest + logical) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw UsageError("replay index out of range");
  return ring_[physical(i)];
}

void ReplayBuffer::push(Transition t) {
  if (size_ > 0) {
    const Transition& first = ring_[physical(0)];
    if (t.state.size() != first.state.size() || t.action.size() != first.action.size() ||
        t.origin.size() != first.origin.size()) {
      throw ConfigError("transition shape differs from stored transitions");
    }
  }
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[head_] = std::move(t);
  }
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
  ++pushed_;
}

int ReplayBuffer::available_length(std::size_t anchor, int want) const {
  int len = 1;
  const Transition* prev = &ring_[physical(anchor)];
  while (len < want && prev->terminal == TerminalKind::none) {
    const std::size_t next = anchor + static_cast<std::size_t>(len);
    if (next >= size_) break;
    const Transition& t = ring_[physical(next)];
    if (t.episode_id != prev->episode_id || t.step_index != prev->step_index + 1) break;
    prev = &t;
    ++len;
  }
  return len;
}

SampledPlanBatch ReplayBuffer::assemble(const std::vector<std::size_t>& anchors, const std::vector<int>& lengths) const {
  const int B = static_cast<int>(anchors.size());
  const Transition& sample0 = ring_[physical(anchors[0])];
  const Eigen::Index obs = sample0.state.size();
  const Eigen::Index act = sample0.action.size();
  int max_len = 1;
  for (int l : lengths) max_len = std::max(max_len, l);

  SampledPlanBatch b;
  b.states.resize(B, obs);
  b.next_states.resize(B, obs);
  b.rewards = Matrix::Zero(B, max_len);
  b.actions.assign(static_cast<std::size_t>(max_len), Matrix(B, act));
  b.lengths = lengths;
  b.bootstrap.resize(static_cast<std::size_t>(B));
  b.anchors = anchors;

  for (int i = 0; i < B; ++i) {
    const std::size_t anchor = anchors[static_cast<std::size_t>(i)];
    const int l = lengths[static_cast<std::size_t>(i)];
    const Transition& first = ring_[physical(anchor)];
    b.states.row(i) = first.state.transpose();
    for (int k = 0; k < max_len; ++k) {
      const Transition& t = ring_[physical(anchor + static_cast<std::size_t>(std::min(k, l - 1)))];
      Vector a = t.action;
      if (frame_ == Frame::ego_setpoint) a -= first.origin;  // world -> anchor's ego frame
      b.actions[static_cast<std::size_t>(k)].row(i) = a.transpose();
      if (k < l) b.rewards(i, k) = t.reward;
    }
    const Transition& last = ring_[physical(anchor + static_cast<std::size_t>(l - 1))];
    b.next_states.row(i) = last.next_state.transpose();
    b.bootstrap[static_cast<std::size_t>(i)] = last.terminal == TerminalKind::terminal ? 0 : 1;
  }
  return b;
}

SampledPlanBatch ReplayBuffer::sample_plan_batch(int batch_size, int max_plan_length, Rng& rng) const {
  if (size_ == 0) throw UsageError("cannot sample from an empty replay buffer");
  if (batch_size <= 0 || max_plan_length <= 0) throw UsageError("batch size and plan length must be positive");
  std::uniform_int_distribution<std::size_t> anchor_dist(0, size_ - 1);
  std::uniform_int_distribution<int> length_dist(1, max_plan_length);
  std::vector<std::size_t> anchors;
  std::vector<int> lengths;
  anchors.reserve(static_cast<std::size_t>(batch_size));
  lengths.reserve(static_cast<std::size_t>(batch_size));
  for (int i = 0; i < batch_size; ++i) {
    const std::size_t anchor = anchor_dist(rng);
    const int want = max_plan_length > 1 ? length_dist(rng) : 1;
    anchors.push_back(anchor);
    lengths.push_back(available_length(anchor, want));
  }
  return assemble(anchors, lengths);
}

SampledPlanBatch ReplayBuffer::sample_transitions(int batch_size, Rng& rng) const {
  if (size_ == 0) throw UsageError("cannot sample from an empty replay buffer");
  if (batch_size <= 0) throw UsageError("batch size must be positive");
  std::uniform_int_distribution<std::size_t> anchor_dist(0, size_ - 1);
  std::vector<std::size_t> anchors;
  for (int i = 0; i < batch_size; ++i) anchors.push_back(anchor_dist(rng));
  return assemble(anchors, std::vector<int>(anchors.size(), 1));
}

void ReplayBuffer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open " + path.string() + " for writing");
  const Transition* probe = size_ > 0 ? &ring_[physical(0)] : nullptr;
  io::put_u32(out, kMagic);
  io::put_u32(out, kVersion);
  io::put_u32(out, probe ? static_cast<std::uint32_t>(probe->state.size()) : 0);
  io::put_u32(out, probe ? static_cast<std::uint32_t>(probe->action.size()) : 0);
  io::put_u32(out, probe ? static_cast<std::uint32_t>(probe->origin.size()) : 0);
  io::put_u8(out, frame_ == Frame::ego_setpoint ? 1 : 0);
  io::put_u64(out, capacity_);
  io::put_u64(out, size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const Transition& t = ring_[physical(i)];
    put_vector(out, t.state);
    put_vector(out, t.action);
    io::put_f64(out, t.reward);
    put_vector(out, t.next_state);
    io::put_u8(out, static_cast<std::uint8_t>(t.terminal));
    io::put_u64(out, t.episode_id);
    io::put_u64(out, t.step_index);
    put_vector(out, t.origin);
  }
  if (!out) throw UsageError("failed writing " + path.string());
}

ReplayBuffer ReplayBuffer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  if (io::get_u32(in) != kMagic) throw UsageError(path.string() + " is not a replay snapshot");
  if (io::get_u32(in) != kVersion) throw UsageError(path.string() + ": unsupported replay snapshot version");
  const std::uint32_t obs = io::get_u32(in);
  const std::uint32_t act = io::get_u32(in);
  const std::uint32_t origin = io::get_u32(in);
  const Frame frame = io::get_u8(in) == 1 ? Frame::ego_setpoint : Frame::raw;
  const std::uint64_t capacity = io::get_u64(in);
  const std::uint64_t count = io::get_u64(in);
  ReplayBuffer buffer(capacity, frame);
  for (std::uint64_t i = 0; i < count; ++i) {
    Transition t;
    t.state = get_vector(in, obs);
    t.action = get_vector(in, act);
    t.reward = io::get_f64(in);
    t.next_state = get_vector(in, obs);
    const std::uint8_t kind = io::get_u8(in);
    if (kind > 2) throw UsageError("corrupt terminal flag in replay snapshot");
    t.terminal = static_cast<TerminalKind>(kind);
    t.episode_id = io::get_u64(in);
    t.step_index = io::get_u64(in);
    t.origin = get_vector(in, origin);
    buffer.push(std::move(t));
  }
  return buffer;
}

}  // namespace planrl::replay
