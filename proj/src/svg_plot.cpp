#include "phonovec/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phonovec/io_util.hpp"

namespace phonovec {

namespace {

constexpr double kW = 480, kH = 360, kLeft = 60, kRight = 20, kTop = 30, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) { return format_number(std::round(v * 100) / 100); }

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
  double py(double y) const { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); }
};

Frame bounds(std::span<const double> xs, std::span<const double> ys) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (double x : xs) {
    if (std::isfinite(x)) x0 = std::min(x0, x), x1 = std::max(x1, x);
  }
  for (double y : ys) {
    if (std::isfinite(y)) y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double mx = 0.05 * (x1 - x0), my = 0.05 * (y1 - y0);
  return {x0 - mx, x1 + mx, y0 - my, y1 + my};
}

std::string axes(const Frame& f, const PlotLabels& labels) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kW) +
                  "\" height=\"" + fmt(kH) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(kW / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" +
       escape(labels.title) + "</text>\n";
  s += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" +
       fmt(kW - kLeft - kRight) + "\" height=\"" + fmt(kH - kTop - kBottom) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4, yv = f.y0 + (f.y1 - f.y0) * i / 4;
    s += "<text x=\"" + fmt(f.px(xv)) + "\" y=\"" + fmt(kH - kBottom + 15) +
         "\" text-anchor=\"middle\">" + fmt(xv) + "</text>\n";
    s += "<text x=\"" + fmt(kLeft - 5) + "\" y=\"" + fmt(f.py(yv) + 4) +
         "\" text-anchor=\"end\">" + fmt(yv) + "</text>\n";
  }
  s += "<text x=\"" + fmt(kW / 2) + "\" y=\"" + fmt(kH - 12) + "\" text-anchor=\"middle\">" +
       escape(labels.x) + "</text>\n";
  s += "<text x=\"14\" y=\"" + fmt(kH / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       fmt(kH / 2) + ")\">" + escape(labels.y) + "</text>\n";
  return s;
}

}  // namespace

std::string scatter_svg(std::span<const double> xs, std::span<const double> ys,
                        const PlotLabels& labels) {
  const Frame f = bounds(xs, ys);
  std::string s = axes(f, labels);
  const std::size_t n = std::min(xs.size(), ys.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    s += "<circle cx=\"" + fmt(f.px(xs[i])) + "\" cy=\"" + fmt(f.py(ys[i])) +
         "\" r=\"2.5\" fill=\"" + kColors[0] + "\" fill-opacity=\"0.6\"/>\n";
  }
  return s + "</svg>\n";
}

std::string line_svg(std::span<const Series> series, const PlotLabels& labels) {
  std::vector<double> all_x, all_y;
  for (const auto& s : series) {
    all_x.insert(all_x.end(), s.xs.begin(), s.xs.end());
    all_y.insert(all_y.end(), s.ys.begin(), s.ys.end());
  }
  const Frame f = bounds(all_x, all_y);
  std::string out = axes(f, labels);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.xs.size(), s.ys.size()); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      pts += fmt(f.px(s.xs[i])) + "," + fmt(f.py(s.ys[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    out += "<text x=\"" + fmt(kW - kRight - 5) + "\" y=\"" + fmt(kTop + 14 + 13 * k) +
           "\" text-anchor=\"end\" fill=\"" + color + "\">" + escape(s.name) + "</text>\n";
  }
  return out + "</svg>\n";
}

}  // namespace phonovec
