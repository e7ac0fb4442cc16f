#pragma once

#include <span>
#include <string>
#include <vector>

namespace phonovec {

struct PlotLabels {
  std::string title;
  std::string x;
  std::string y;
};

/// Static SVG scatter plot.
std::string scatter_svg(std::span<const double> xs, std::span<const double> ys,
                        const PlotLabels& labels);

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

/// Static SVG line plot, one polyline per series.
std::string line_svg(std::span<const Series> series, const PlotLabels& labels);

}  // namespace phonovec
