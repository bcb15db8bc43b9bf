#include "greedy_tools/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace greedy::tools {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 190, kTop = 40, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v)
{
    char buf[32];
    if (v >= 1e-3 && v < 1e5) std::snprintf(buf, sizeof buf, "%g", v);
    else std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(std::log10(v))));
    return buf;
}

struct Axis {
    double lo, hi;  // log10 range
    double pix_lo, pix_hi;
    double map(double v) const { return pix_lo + (std::log10(v) - lo) / (hi - lo) * (pix_hi - pix_lo); }
};

/// Decades, plus 2 and 5 multiples when the range is short.
std::vector<double> ticks(const Axis& a)
{
    std::vector<double> out;
    const bool dense = a.hi - a.lo < 2.5;
    for (int d = static_cast<int>(std::floor(a.lo)); d <= static_cast<int>(std::ceil(a.hi)); ++d) {
        for (double mult : {1.0, 2.0, 5.0}) {
            if (mult != 1.0 && !dense) continue;
            const double v = mult * std::pow(10.0, d);
            const double lv = std::log10(v);
            if (lv >= a.lo - 1e-9 && lv <= a.hi + 1e-9) out.push_back(v);
        }
    }
    return out;
}

} // namespace

std::string render_svg(const LogLogChart& chart)
{
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const PlotSeries& s : chart.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!(xmin < std::numeric_limits<double>::infinity())) xmin = 1, xmax = 10, ymin = 1, ymax = 10;
    Axis ax{std::log10(xmin), std::log10(xmax), kLeft, kWidth - kRight};
    Axis ay{std::log10(ymin), std::log10(ymax), kHeight - kBottom, kTop};
    if (ax.hi - ax.lo < 1e-12) ax.lo -= 0.5, ax.hi += 0.5;
    if (ay.hi - ay.lo < 1e-12) ay.lo -= 0.5, ay.hi += 0.5;
    const double pad = 0.04 * (ay.hi - ay.lo);
    ay.lo -= pad;
    ay.hi += pad;

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(chart.title) + "</text>\n";

    for (double v : ticks(ax)) {
        const double px = ax.map(v);
        svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(px) + "\" y2=\"" + num(kHeight - kBottom) +
               "\" stroke=\"#e0e0e0\"/>\n";
        svg += "<text x=\"" + num(px) + "\" y=\"" + num(kHeight - kBottom + 18) + "\" text-anchor=\"middle\">" +
               tick_label(v) + "</text>\n";
    }
    for (double v : ticks(ay)) {
        const double py = ay.map(v);
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" + num(py) +
               "\" stroke=\"#e0e0e0\"/>\n";
        svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" + tick_label(v) + "</text>\n";
    }
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kWidth - kRight - kLeft) + "\" height=\"" +
           num(kHeight - kBottom - kTop) + "\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 18) + "\" text-anchor=\"middle\">" +
           escape(chart.x_label) + "</text>\n";
    svg += "<text transform=\"translate(20," + num((kTop + kHeight - kBottom) / 2) +
           ") rotate(-90)\" text-anchor=\"middle\">" + escape(chart.y_label) + "</text>\n";

    svg += "<defs><clipPath id=\"plot\"><rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
           num(kWidth - kRight - kLeft) + "\" height=\"" + num(kHeight - kBottom - kTop) + "\"/></clipPath></defs>\n";

    double legend_y = kTop + 10;
    auto legend = [&](const std::string& label, const std::string& color, bool dashed) {
        const double x = kWidth - kRight + 14;
        svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(legend_y) + "\" x2=\"" + num(x + 24) + "\" y2=\"" + num(legend_y) +
               "\" stroke=\"" + color + "\" stroke-width=\"2\"" + (dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
        svg += "<text x=\"" + num(x + 30) + "\" y=\"" + num(legend_y + 4) + "\">" + escape(label) + "</text>\n";
        legend_y += 18;
    };

    std::size_t color = 0;
    for (const PlotSeries& s : chart.series) {
        const std::string c = kColors[color++ % std::size(kColors)];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
            pts += num(ax.map(s.x[i])) + "," + num(ay.map(s.y[i])) + " ";
        }
        svg += "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" + c + "\" stroke-width=\"1.8\" points=\"" + pts +
               "\"/>\n";
        legend(s.label, c, false);
    }
    for (const SlopeGuide& g : chart.guides) {
        if (!(g.x0 > 0.0) || !(g.y0 > 0.0)) continue;
        const double xa = std::pow(10.0, ax.lo), xb = std::pow(10.0, ax.hi);
        const double ya = g.y0 * std::pow(xa / g.x0, g.slope), yb = g.y0 * std::pow(xb / g.x0, g.slope);
        svg += "<line clip-path=\"url(#plot)\" x1=\"" + num(ax.map(xa)) + "\" y1=\"" + num(ay.map(ya)) + "\" x2=\"" +
               num(ax.map(xb)) + "\" y2=\"" + num(ay.map(yb)) + "\" stroke=\"#555555\" stroke-width=\"1.2\" stroke-dasharray=\"6,4\"/>\n";
        legend(g.label, "#555555", true);
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace greedy::tools
