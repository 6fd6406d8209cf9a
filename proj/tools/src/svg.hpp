#pragma once

#include <string>
#include <vector>

namespace wsp::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
};

/// Standalone SVG document: axes with ticks, a legend, one polyline per
/// series. Non-finite points are skipped.
std::string render_svg(const LineChart& chart);

}  // namespace wsp::cli
