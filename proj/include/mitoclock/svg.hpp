#pragma once

#include <string>
#include <vector>

namespace mitoclock::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double width = 720;
  double height = 480;
};

// Line plot with axes, ticks and a legend; returns the SVG document.
std::string line_plot(const std::vector<Series>& series, const PlotSpec& spec);

} // namespace mitoclock::svg
