#pragma once

#include <string>
#include <vector>

namespace framefem {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Minimal deterministic SVG line plot: axes, ticks, polylines, legend.
/// Callers pass already-transformed values (log10 etc.) and say so in the
/// axis label.
struct LinePlot {
  std::string title, xlabel, ylabel;
  std::vector<PlotSeries> series;
  int width = 760;
  int height = 520;
};

void write_svg(const std::string& path, const LinePlot& plot);

} // namespace framefem
