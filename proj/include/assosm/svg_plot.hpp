// Copyright 2026 The assosm Authors
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

#ifndef ASSOSM_SVG_PLOT_HPP_
#define ASSOSM_SVG_PLOT_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace assosm {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 420;
  /// Points kept per series; longer series are decimated by stride.
  std::size_t max_points = 4000;
};

/// Static line chart with axes, ticks and a legend.
std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series);
void write_svg(const std::filesystem::path& file, const PlotSpec& spec,
               const std::vector<Series>& series);

}  // namespace assosm

#endif  // ASSOSM_SVG_PLOT_HPP_
