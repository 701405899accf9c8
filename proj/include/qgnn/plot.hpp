#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qgnn {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

/// Deterministic SVG rendering (text depends only on the inputs). Multiple
/// charts stack vertically in one document.
std::string render_charts(const std::vector<PlotSpec> &specs);

inline std::string render_line_chart(const PlotSpec &spec) { return render_charts({spec}); }

} // namespace qgnn
