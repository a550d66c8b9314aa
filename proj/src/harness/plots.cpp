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

#include "planrl/harness/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

namespace planrl::harness {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

class Canvas {
 public:
  Canvas(Range x, Range y) : x_(x), y_(y) {}
  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  std::string frame(const std::string& title, const std::string& x_label, const std::string& y_label) const {
    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight);
    s += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", kWidth / 2,
                     escape(title));
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n", kLeft,
                     kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n", px(xv),
                       kHeight - kBottom + 16, xv);
      s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", kLeft - 6, py(yv) + 4,
                       yv);
    }
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kWidth / 2, kHeight - 12,
                     escape(x_label));
    s += fmt::format("<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
                     kHeight / 2, escape(y_label));
    return s;
  }

 private:
  Range x_;
  Range y_;
};

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series) {
  Range xr, yr;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xr.add(s.x[i]);
      const double band = i < s.spread.size() ? s.spread[i] : 0.0;
      yr.add(s.y[i] - band);
      yr.add(s.y[i] + band);
    }
  }
  xr.settle();
  yr.settle();
  const Canvas c(xr, yr);
  std::string out = c.frame(title, x_label, y_label);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    if (s.spread.size() == s.y.size() && !s.y.empty()) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i) pts += fmt::format("{:.2f},{:.2f} ", c.px(s.x[i]), c.py(s.y[i] + s.spread[i]));
      for (std::size_t i = s.x.size(); i-- > 0;) pts += fmt::format("{:.2f},{:.2f} ", c.px(s.x[i]), c.py(s.y[i] - s.spread[i]));
      out += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n", pts, color);
    }
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) pts += fmt::format("{:.2f},{:.2f} ", c.px(s.x[i]), c.py(s.y[i]));
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", pts, color);
    out += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", kLeft + 10, kTop + 16 + 16 * double(k), color,
                       escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

std::string visitation_svg(const std::string& title, const std::vector<Vector>& positions) {
  if (positions.empty() || positions.front().size() < 2) {
    constexpr int kBins = 50;
    Range xr;
    for (const Vector& p : positions) xr.add(p(0));
    xr.settle();
    std::vector<double> counts(kBins, 0.0);
    for (const Vector& p : positions) {
      const int b = std::clamp(int((p(0) - xr.lo) / (xr.hi - xr.lo) * kBins), 0, kBins - 1);
      counts[std::size_t(b)] += 1.0;
    }
    Range yr;
    yr.add(0.0);
    yr.add(*std::max_element(counts.begin(), counts.end()));
    yr.settle();
    const Canvas c(xr, yr);
    std::string out = c.frame(title, "position", "visits");
    const double w = (xr.hi - xr.lo) / kBins;
    for (int b = 0; b < kBins; ++b) {
      const double x0 = xr.lo + w * b;
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         c.px(x0), c.py(counts[std::size_t(b)]), c.px(x0 + w) - c.px(x0),
                         c.py(0.0) - c.py(counts[std::size_t(b)]), kColors[0]);
    }
    return out + "</svg>\n";
  }
  Range xr, yr;
  for (const Vector& p : positions) {
    xr.add(p(0));
    yr.add(p(1));
  }
  xr.settle();
  yr.settle();
  const Canvas c(xr, yr);
  std::string out = c.frame(title, "x", "y");
  const std::size_t stride = std::max<std::size_t>(1, positions.size() / 5000);
  for (std::size_t i = 0; i < positions.size(); i += stride) {
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1.5\" fill=\"{}\" fill-opacity=\"0.4\"/>\n",
                       c.px(positions[i](0)), c.py(positions[i](1)), kColors[0]);
  }
  return out + "</svg>\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

}  // namespace planrl::harness
