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

#include "planrl/diffcore/adam.hpp"

#include <cmath>

namespace planrl::diff {

void Adam::step(const std::vector<ParamStore*>& stores) {
  if (m_.empty()) {
    for (const ParamStore* s : stores) {
      std::vector<Matrix> zeros;
      for (const auto& p : *s) zeros.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      m_.push_back(zeros);
      v_.push_back(std::move(zeros));
    }
  }
  if (m_.size() != stores.size()) throw UsageError("Adam::step called with a different set of stores");

  double norm_sq = 0.0;
  for (const ParamStore* s : stores) {
    for (const auto& p : *s) {
      const double sq = p.grad.squaredNorm();
      if (!std::isfinite(sq) && !p.grad.allFinite()) {
        throw NumericError("non-finite gradient in parameter '" + p.name + "'");
      }
      norm_sq += sq;
    }
  }
  double clip = 1.0;
  const double norm = std::sqrt(norm_sq);
  if (options_.clip_norm > 0.0 && norm > options_.clip_norm) clip = options_.clip_norm / norm;

  ++t_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = options_.learning_rate;

  for (std::size_t s = 0; s < stores.size(); ++s) {
    ParamStore& store = *stores[s];
    if (m_[s].size() != store.size()) throw UsageError("Adam::step store layout changed");
    for (std::size_t i = 0; i < store.size(); ++i) {
      auto& p = store[i];
      Matrix& m = m_[s][i];
      Matrix& v = v_[s][i];
      m = b1 * m + (1.0 - b1) * (p.grad * clip);
      v = b2 * v + (1.0 - b2) * (p.grad * clip).cwiseAbs2();
      if (lr != 0.0) {
        p.value.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + options_.epsilon);
      }
      p.grad.setZero();
    }
  }
}

}  // namespace planrl::diff
