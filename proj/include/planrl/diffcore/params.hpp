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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planrl/common.hpp"

namespace planrl::diff {

using ParamId = std::size_t;

/// Named parameter arrays, each paired with a gradient slot of the same shape.
///
/// Layers keep only ParamIds into a store, so copying a store (and the model
/// around it) yields an independent network with the same layout. Target
/// critics are made this way.
class ParamStore {
 public:
  struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
  };

  ParamId add(std::string name, Matrix init);

  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }
  Param& operator[](ParamId id) { return params_.at(id); }
  const Param& operator[](ParamId id) const { return params_.at(id); }

  std::optional<ParamId> find(std::string_view name) const;

  void zero_grad();

  // Same count, names, and shapes.
  bool same_layout(const ParamStore& other) const;

  std::size_t scalar_count() const;

  // Flat views, in registration order. Used by gradient checks and snapshots.
  Vector flatten_values() const;
  Vector flatten_grads() const;
  void assign_values(const Vector& flat);

  bool operator==(const ParamStore& other) const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Param> params_;
};

/// target <- eta * source + (1 - eta) * target, elementwise.
void soft_update(ParamStore& target, const ParamStore& source, double eta);

// Little-endian binary snapshot of a store's values (names and shapes included).
void write_params(std::ostream& out, const ParamStore& store);
void read_params(std::istream& in, ParamStore& store);

}  // namespace planrl::diff
