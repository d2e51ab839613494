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

#pragma once

#include <span>
#include <string>
#include <vector>

#include "ipitch/contour.hpp"

namespace ipitch {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 640;
  int height = 400;
};

// Self-contained SVG document. Non-finite points break the polyline.
std::string render_line_chart(const LineChart& chart);

// F2 on the x axis, F1 on the y axis, both reversed as is customary; one
// marker and 1-sd ellipse per (phone, mode) row.
std::string render_vowel_space(std::span<const VowelSpaceRow> rows, const std::string& title, int width = 640,
                               int height = 480);

}  // namespace ipitch
