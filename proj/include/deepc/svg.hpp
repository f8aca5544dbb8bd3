#pragma once

#include <string>
#include <vector>

#include "deepc/signal.hpp"

namespace deepc {

/// One polyline of a plot; x and y must have equal length.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained SVG line plot (axes, ticks, legend). Deterministic bytes
/// for identical input.
std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<PlotSeries>& series,
                             int width = 720, int height = 440, bool log_x = false);

void write_svg_file(const std::string& path, const std::string& svg);

/// Convenience: one series per signal channel against the step index.
std::vector<PlotSeries> series_from_signal(const Signal& s, const std::string& prefix);

}  // namespace deepc
