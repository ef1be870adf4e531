#pragma once

#include <string>
#include <vector>

namespace softclik {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Self-contained SVG line plot with auto-scaled axes, tick labels, and a
/// small legend. Intended for quick inspection of runs, not publication.
void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series);

}  // namespace softclik
