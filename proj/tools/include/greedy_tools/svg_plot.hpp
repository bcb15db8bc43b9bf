#pragma once

#include <optional>
#include <string>
#include <vector>

namespace greedy::tools {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Straight line y = C x^slope on log-log axes, drawn dashed through (x0, y0).
struct SlopeGuide {
    std::string label;
    double slope = -1.0;
    double x0 = 1.0;
    double y0 = 1.0;
};

struct LogLogChart {
    std::string title;
    std::string x_label = "n";
    std::string y_label = "error";
    std::vector<PlotSeries> series;
    std::vector<SlopeGuide> guides;
};

/// Self-contained SVG document. Nonpositive samples are skipped.
std::string render_svg(const LogLogChart& chart);

} // namespace greedy::tools
