#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ispmarket::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // NaN entries break the line
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

// Static SVG with axes, five ticks per axis, one polyline per series and a
// legend. Output depends only on the chart contents.
std::string render_svg(const LineChart& chart);

// Throws std::runtime_error when the file cannot be written.
void write_svg(const std::filesystem::path& path, const LineChart& chart);

}  // namespace ispmarket::cli
