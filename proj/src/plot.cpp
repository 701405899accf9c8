#include "qgnn/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qgnn {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 200.0; // room for the legend
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string &text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string render_one(const PlotSpec &spec, double y_offset) {
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
    bool first = true;
    for (const PlotSeries &s : spec.series) {
        for (const auto &[x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                continue;
            }
            if (first) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                first = false;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (first) {
        throw std::invalid_argument(
            fmt::format("plot '{}' has no finite points", spec.title));
    }
    if (x_hi == x_lo) {
        x_hi = x_lo + 1.0;
    }
    if (y_hi == y_lo) {
        y_hi = y_lo + 1.0;
    }

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double y) { return kTop + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h; };

    std::string svg = fmt::format("<g transform=\"translate(0,{:.0f})\">\n", y_offset);
    svg += fmt::format("<text x=\"{}\" y=\"28\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + plot_w / 2, escape(spec.title));
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
                       "stroke=\"#333\"/>\n",
                       kLeft, kTop, plot_w, plot_h);
    for (int t = 0; t <= 4; ++t) {
        const double fx = x_lo + (x_hi - x_lo) * t / 4.0;
        const double fy = y_lo + (y_hi - y_lo) * t / 4.0;
        svg += fmt::format(
            "<line x1=\"{:.2f}\" y1=\"{}\" x2=\"{:.2f}\" y2=\"{}\" stroke=\"#ddd\"/>\n",
            sx(fx), kTop, sx(fx), kTop + plot_h);
        svg += fmt::format(
            "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n",
            kLeft, sy(fy), kLeft + plot_w, sy(fy));
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-size=\"11\" "
                           "text-anchor=\"middle\">{:.4g}</text>\n",
                           sx(fx), kTop + plot_h + 18, fx);
        svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-size=\"11\" "
                           "text-anchor=\"end\">{:.4g}</text>\n",
                           kLeft - 6, sy(fy) + 4, fy);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + plot_w / 2, kHeight - 14, escape(spec.x_label));
    svg += fmt::format("<text x=\"18\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" "
                       "transform=\"rotate(-90 18 {})\">{}</text>\n",
                       kTop + plot_h / 2, kTop + plot_h / 2, escape(spec.y_label));

    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        const char *colour = kPalette[s % std::size(kPalette)];
        std::string path;
        for (const auto &[x, y] : spec.series[s].points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                continue;
            }
            path += fmt::format("{}{:.2f},{:.2f}", path.empty() ? "M" : " L", sx(x), sy(y));
        }
        if (!path.empty()) {
            svg += fmt::format(
                "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", path,
                colour);
        }
        const double ly = kTop + 16.0 + 18.0 * static_cast<double>(s);
        svg += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" "
                           "stroke=\"{}\" stroke-width=\"2\"/>\n",
                           kLeft + plot_w + 12, ly, kLeft + plot_w + 34, ly, colour);
        svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-size=\"11\">{}</text>\n",
                           kLeft + plot_w + 40, ly + 4, escape(spec.series[s].label));
    }
    svg += "</g>\n";
    return svg;
}

} // namespace

std::string render_charts(const std::vector<PlotSpec> &specs) {
    if (specs.empty()) {
        throw std::invalid_argument("render_charts: no charts given");
    }
    const double total_height = kHeight * static_cast<double>(specs.size());
    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\">\n",
        kWidth, total_height, kWidth, total_height);
    svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth,
                       total_height);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        svg += render_one(specs[i], kHeight * static_cast<double>(i));
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace qgnn
