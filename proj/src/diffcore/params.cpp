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

#include "planrl/diffcore/params.hpp"

#include <istream>
#include <ostream>

#include "planrl/binary_io.hpp"

namespace planrl::diff {

namespace {
constexpr std::uint32_t kParamMagic = 0x50524d50;  // "PMRP" little-endian
constexpr std::uint32_t kParamVersion = 1;
}  // namespace

ParamId ParamStore::add(std::string name, Matrix init) {
  if (find(name)) throw ConfigError("duplicate parameter name '" + name + "'");
  Matrix grad = Matrix::Zero(init.rows(), init.cols());
  params_.push_back({std::move(name), std::move(init), std::move(grad)});
  return params_.size() - 1;
}

std::optional<ParamId> ParamStore::find(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  return std::nullopt;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

bool ParamStore::same_layout(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& a = params_[i];
    const auto& b = other.params_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) {
      return false;
    }
  }
  return true;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

Vector ParamStore::flatten_values() const {
  Vector flat(static_cast<Eigen::Index>(scalar_count()));
  Eigen::Index at = 0;
  for (const auto& p : params_) {
    flat.segment(at, p.value.size()) = p.value.reshaped();
    at += p.value.size();
  }
  return flat;
}

Vector ParamStore::flatten_grads() const {
  Vector flat(static_cast<Eigen::Index>(scalar_count()));
  Eigen::Index at = 0;
  for (const auto& p : params_) {
    flat.segment(at, p.grad.size()) = p.grad.reshaped();
    at += p.grad.size();
  }
  return flat;
}

void ParamStore::assign_values(const Vector& flat) {
  if (static_cast<std::size_t>(flat.size()) != scalar_count()) {
    throw ConfigError("flat parameter vector has wrong length");
  }
  Eigen::Index at = 0;
  for (auto& p : params_) {
    p.value.reshaped() = flat.segment(at, p.value.size());
    at += p.value.size();
  }
}

bool ParamStore::operator==(const ParamStore& other) const {
  if (!same_layout(other)) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].value != other.params_[i].value) return false;
  }
  return true;
}

void soft_update(ParamStore& target, const ParamStore& source, double eta) {
  if (!target.same_layout(source)) throw ConfigError("soft_update: parameter layouts differ");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("soft_update: eta must lie in [0, 1]");
  for (std::size_t i = 0; i < target.size(); ++i) {
    auto& t = target[i].value;
    const auto& s = source[i].value;
    if (eta == 1.0) {
      t = s;
    } else if (eta != 0.0) {
      t = eta * s + (1.0 - eta) * t;
    }
  }
}

void write_params(std::ostream& out, const ParamStore& store) {
  io::put_u32(out, kParamMagic);
  io::put_u32(out, kParamVersion);
  io::put_u32(out, static_cast<std::uint32_t>(store.size()));
  for (const auto& p : store) {
    io::put_string(out, p.name);
    io::put_u32(out, static_cast<std::uint32_t>(p.value.rows()));
    io::put_u32(out, static_cast<std::uint32_t>(p.value.cols()));
    for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
      for (Eigen::Index r = 0; r < p.value.rows(); ++r) io::put_f64(out, p.value(r, c));
    }
  }
}

void read_params(std::istream& in, ParamStore& store) {
  if (io::get_u32(in) != kParamMagic) throw UsageError("not a parameter snapshot");
  if (io::get_u32(in) != kParamVersion) throw UsageError("unsupported parameter snapshot version");
  const std::uint32_t count = io::get_u32(in);
  if (count != store.size()) throw ConfigError("parameter snapshot has a different layout");
  for (auto& p : store) {
    const std::string name = io::get_string(in);
    const auto rows = io::get_u32(in);
    const auto cols = io::get_u32(in);
    if (name != p.name || rows != p.value.rows() || cols != p.value.cols()) {
      throw ConfigError("parameter snapshot mismatch at '" + p.name + "'");
    }
    for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
      for (Eigen::Index r = 0; r < p.value.rows(); ++r) p.value(r, c) = io::get_f64(in);
    }
  }
}

}  // namespace planrl::diff
