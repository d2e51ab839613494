// Copyright 2026 The ipitch Authors.
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

#include "ipitch/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ipitch/error.hpp"

namespace ipitch {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr double kLeft = 64.0, kRight = 24.0, kTop = 40.0, kBottom = 48.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
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
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

struct Frame {
  double width, height;
  Range x, y;
  bool flip_x = false, flip_y = false;

  double px(double v) const {
    double t = (v - x.lo) / (x.hi - x.lo);
    if (flip_x) t = 1.0 - t;
    return kLeft + t * (width - kLeft - kRight);
  }
  double py(double v) const {
    double t = (v - y.lo) / (y.hi - y.lo);
    if (flip_y) t = 1.0 - t;
    return height - kBottom - t * (height - kTop - kBottom);
  }
};

void open_svg(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& x_label,
              const std::string& y_label) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
     << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(f.width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  const double x0 = kLeft, x1 = f.width - kRight, y0 = kTop, y1 = f.height - kBottom;
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
     << num(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double vx = f.x.lo + (f.x.hi - f.x.lo) * i / 4.0;
    const double vy = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
    os << "<text x=\"" << num(f.px(vx)) << "\" y=\"" << num(y1 + 16) << "\" text-anchor=\"middle\">" << tick(vx)
       << "</text>\n";
    os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.py(vy) + 4) << "\" text-anchor=\"end\">" << tick(vy)
       << "</text>\n";
  }
  os << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(f.height - 10) << "\" text-anchor=\"middle\">"
     << escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(14," << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(y_label) << "</text>\n";
}

void legend(std::ostringstream& os, const Frame& f, std::size_t index, const std::string& label, const char* colour,
            bool dashed) {
  const double x = f.width - kRight - 150.0, y = kTop + 14.0 + 16.0 * static_cast<double>(index);
  os << "<line x1=\"" << num(x) << "\" y1=\"" << num(y - 4) << "\" x2=\"" << num(x + 20) << "\" y2=\"" << num(y - 4)
     << "\" stroke=\"" << colour << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "")
     << "/>\n";
  os << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y) << "\">" << escape(label) << "</text>\n";
}

}  // namespace

std::string render_line_chart(const LineChart& chart) {
  if (chart.width < 200 || chart.height < 150) fail(ErrorKind::InvalidArgument, "chart is too small");
  Frame f{static_cast<double>(chart.width), static_cast<double>(chart.height), {}, {}};
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) fail(ErrorKind::ShapeMismatch, "series " + s.label + " has unequal x and y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) f.x.add(s.x[i]), f.y.add(s.y[i]);
    }
  }
  f.x.finish();
  f.y.finish();

  std::ostringstream os;
  open_svg(os, f, chart.title, chart.x_label, chart.y_label);
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const Series& s = chart.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    std::string points;
    auto flush = [&] {
      if (points.empty()) return;
      os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\""
         << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << points << "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(f.px(s.x[i])) + "," + num(f.py(s.y[i]));
    }
    flush();
    legend(os, f, k, s.label, colour, s.dashed);
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_vowel_space(std::span<const VowelSpaceRow> rows, const std::string& title, int width, int height) {
  if (width < 200 || height < 150) fail(ErrorKind::InvalidArgument, "chart is too small");
  Frame f{static_cast<double>(width), static_cast<double>(height), {}, {}, true, true};
  for (const auto& r : rows) {
    const double reach = r.ellipse_major;
    f.x.add(r.f2_mean - reach);
    f.x.add(r.f2_mean + reach);
    f.y.add(r.f1_mean - reach);
    f.y.add(r.f1_mean + reach);
  }
  f.x.finish();
  f.y.finish();

  std::ostringstream os;
  open_svg(os, f, title, "F2 (Hz)", "F1 (Hz)");
  constexpr double kPi = 3.14159265358979323846;
  for (const auto& r : rows) {
    const bool whispered = r.mode == Mode::Whispered;
    const char* colour = whispered ? kPalette[1] : kPalette[0];
    // Ellipse traced in data space (F1 along the first axis) so the reversed
    // axes need no special casing.
    const double a = r.ellipse_angle_deg * kPi / 180.0;
    std::string points;
    for (int i = 0; i <= 72; ++i) {
      const double t = 2.0 * kPi * i / 72.0;
      const double u = r.ellipse_major * std::cos(t), v = r.ellipse_minor * std::sin(t);
      const double f1 = r.f1_mean + u * std::cos(a) - v * std::sin(a);
      const double f2 = r.f2_mean + u * std::sin(a) + v * std::cos(a);
      if (i) points += ' ';
      points += num(f.px(f2)) + "," + num(f.py(f1));
    }
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\"" << (whispered ? " stroke-dasharray=\"5,3\"" : "")
       << " points=\"" << points << "\"/>\n";
    os << "<circle cx=\"" << num(f.px(r.f2_mean)) << "\" cy=\"" << num(f.py(r.f1_mean)) << "\" r=\"3\" fill=\""
       << colour << "\"/>\n";
    os << "<text x=\"" << num(f.px(r.f2_mean) + 5) << "\" y=\"" << num(f.py(r.f1_mean) - 5) << "\" fill=\"" << colour
       << "\">" << escape(r.phone) << "</text>\n";
  }
  legend(os, f, 0, "phonated", kPalette[0], false);
  legend(os, f, 1, "whispered", kPalette[1], true);
  os << "</svg>\n";
  return os.str();
}

}  // namespace ipitch
