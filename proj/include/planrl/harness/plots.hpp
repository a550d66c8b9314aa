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

#include <filesystem>
#include <string>
#include <vector>

#include "planrl/common.hpp"

namespace planrl::harness {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> spread;  // optional +-band, same length as y
};

/// Line chart with optional shaded bands, as a standalone SVG document.
std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series);

/// Visitation: a histogram of 1-d positions or a scatter of 2-d ones.
std::string visitation_svg(const std::string& title, const std::vector<Vector>& positions);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace planrl::harness
