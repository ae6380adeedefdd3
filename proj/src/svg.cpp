#include "revana/svg.hpp"

#include "revana/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace revana::svg {

namespace {

constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 46;
constexpr int kMarginBottom = 58;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

std::string escape_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string LineChart::render() const {
    if (series.empty()) raise(ErrorCode::InvalidArgument, "chart needs at least one series");
    std::size_t n = series[0].values.size();
    for (const LineSeries& s : series) {
        if (s.values.size() != n) {
            raise(ErrorCode::InvalidArgument, "all chart series must share a length");
        }
    }
    if (n < 2) raise(ErrorCode::InvalidArgument, "chart needs at least two points");

    double y_min = zero_line ? 0.0 : 0.0;
    double y_max = 0.0;
    for (const LineSeries& s : series) {
        for (double v : s.values) {
            y_max = std::max(y_max, v);
            y_min = std::min(y_min, v);
        }
    }
    if (y_max == y_min) y_max = y_min + 1.0;
    double pad = (y_max - y_min) * 0.05;
    y_max += pad;
    if (y_min < 0.0) y_min -= pad;

    const double plot_w = static_cast<double>(width - kMarginLeft - kMarginRight);
    const double plot_h = static_cast<double>(height - kMarginTop - kMarginBottom);
    auto x_px = [&](std::size_t i) {
        return kMarginLeft + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    auto y_px = [&](double v) {
        return kMarginTop + plot_h * (1.0 - (v - y_min) / (y_max - y_min));
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "  <rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "  <text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape_text(title)
        << "</text>\n";

    // Frame and gridlines.
    out << "  <rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
        << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    for (int g : x_gridlines) {
        if (g < 1 || static_cast<std::size_t>(g) > n) continue;
        double x = x_px(static_cast<std::size_t>(g - 1));
        out << "  <line x1=\"" << fmt(x) << "\" y1=\"" << kMarginTop << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << fmt(kMarginTop + plot_h)
            << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
    }
    if (zero_line && y_min < 0.0) {
        out << "  <line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(y_px(0.0)) << "\" x2=\""
            << fmt(kMarginLeft + plot_w) << "\" y2=\"" << fmt(y_px(0.0))
            << "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
    }

    // Y ticks.
    for (int t = 0; t <= 4; ++t) {
        double v = y_min + (y_max - y_min) * static_cast<double>(t) / 4.0;
        double y = y_px(v);
        out << "  <line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << fmt(y) << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << fmt(y)
            << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out << "  <text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(y + 4.0)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(v) << "</text>\n";
    }
    // X ticks on gridline positions (fall back to first/last).
    std::vector<int> ticks = x_gridlines;
    if (ticks.empty()) ticks = {1, static_cast<int>(n)};
    for (int g : ticks) {
        if (g < 1 || static_cast<std::size_t>(g) > n) continue;
        double x = x_px(static_cast<std::size_t>(g - 1));
        out << "  <text x=\"" << fmt(x) << "\" y=\"" << fmt(kMarginTop + plot_h + 18.0)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << g
            << "</text>\n";
    }

    // Axis labels.
    out << "  <text x=\"" << fmt(kMarginLeft + plot_w / 2.0) << "\" y=\"" << height - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape_text(x_label) << "</text>\n";
    out << "  <text x=\"18\" y=\"" << fmt(kMarginTop + plot_h / 2.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << fmt(kMarginTop + plot_h / 2.0) << ")\">"
        << escape_text(y_label) << "</text>\n";

    // Series polylines.
    for (const LineSeries& s : series) {
        out << "  <polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            if (i) out.put(' ');
            out << fmt(x_px(i)) << ',' << fmt(y_px(s.values[i]));
        }
        out << "\"/>\n";
    }

    // Legend, top-right inside the frame.
    double lx = kMarginLeft + plot_w - 190.0;
    double ly = kMarginTop + 10.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        double y = ly + static_cast<double>(i) * 18.0;
        out << "  <line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(y) << "\" x2=\""
            << fmt(lx + 22.0) << "\" y2=\"" << fmt(y) << "\" stroke=\"" << series[i].color
            << "\" stroke-width=\"2\"/>\n";
        out << "  <text x=\"" << fmt(lx + 28.0) << "\" y=\"" << fmt(y + 4.0)
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << escape_text(series[i].label) << "</text>\n";
    }

    out << "</svg>\n";
    return out.str();
}

} // namespace revana::svg
