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

#include <algorithm>
#include <cstddef>
#include <vector>

#include "planrl/common.hpp"

namespace planrl::plan {

/// An ordered sequence of actions starting at the current step.
struct Plan {
  std::vector<Vector> actions;
  Frame frame = Frame::raw;

  std::size_t size() const { return actions.size(); }
  bool empty() const { return actions.empty(); }
  const Vector& operator[](std::size_t i) const { return actions[i]; }

  // First `length` actions.
  Plan prefix(std::size_t length) const;

  bool operator==(const Plan&) const = default;
};

inline Plan Plan::prefix(std::size_t length) const {
  Plan p{{}, frame};
  p.actions.assign(actions.begin(), actions.begin() + static_cast<std::ptrdiff_t>(std::min(length, actions.size())));
  return p;
}

}  // namespace planrl::plan
