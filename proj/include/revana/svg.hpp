#pragma once

#include <string>
#include <vector>

namespace revana::svg {

struct LineSeries {
    std::string label;
    std::string color; // CSS color
    std::vector<double> values;
};

/// Minimal deterministic SVG line chart: x is the 1-based position index,
/// y is the value. All coordinates are emitted with fixed precision, so
/// identical inputs produce identical bytes.
struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 860;
    int height = 460;
    std::vector<LineSeries> series;
    /// Vertical gridlines at these 1-based x positions (e.g. week starts).
    std::vector<int> x_gridlines;
    /// Optional zero-centred horizontal reference line (seasonality plots).
    bool zero_line = false;

    std::string render() const;
};

std::string escape_text(const std::string& text);

} // namespace revana::svg
