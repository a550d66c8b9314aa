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

#include <vector>

#include "planrl/diffcore/params.hpp"

namespace planrl::diff {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global-norm clip over all stores passed to one step; <= 0 disables.
  double clip_norm = 10.0;
};

/// Bias-corrected adaptive-moment descent over one or more stores.
///
/// Moments are keyed by position: pass the same stores in the same order on
/// every step. Gradient slots are zeroed after the update.
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  // Throws NumericError naming the first parameter with a non-finite gradient.
  void step(const std::vector<ParamStore*>& stores);
  void step(ParamStore& store) { step(std::vector<ParamStore*>{&store}); }

  const AdamOptions& options() const { return options_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }
  long steps() const { return t_; }

 private:
  AdamOptions options_;
  long t_ = 0;
  std::vector<std::vector<Matrix>> m_;
  std::vector<std::vector<Matrix>> v_;
};

}  // namespace planrl::diff
