#include "revana/timeseries.hpp"

#include "revana/csv.hpp"
#include "revana/errors.hpp"
#include "revana/revlog.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace revana {

std::vector<std::optional<double>> moving_average_trend(std::span<const double> values,
                                                        int window) {
    if (window < 1 || window % 2 == 0) {
        raise(ErrorCode::EvenWindow, "moving average window must be odd, got " +
                                         std::to_string(window));
    }
    if (static_cast<std::size_t>(window) > values.size()) {
        raise(ErrorCode::WindowTooLarge, "window " + std::to_string(window) +
                                             " exceeds series length " +
                                             std::to_string(values.size()));
    }
    const int n = static_cast<int>(values.size());
    const int half = window / 2;
    std::vector<std::optional<double>> trend(values.size());
    for (int i = half; i < n - half; ++i) {
        double sum = 0.0;
        for (int j = i - half; j <= i + half; ++j) sum += values[j];
        trend[i] = sum / static_cast<double>(window);
    }
    return trend;
}

DecompositionResult seasonal_decompose_additive(std::span<const double> values, int period) {
    if (period < 2) {
        raise(ErrorCode::InvalidArgument, "period must be at least 2");
    }
    if (values.size() < 2 * static_cast<std::size_t>(period)) {
        raise(ErrorCode::SeriesTooShort,
              "need at least " + std::to_string(2 * period) + " observations, got " +
                  std::to_string(values.size()));
    }
    // Odd period: plain centred moving average is already symmetric.
    // Even period would need the extra 2-point smoothing pass.
    int ma_window = period % 2 == 1 ? period : period + 1;

    DecompositionResult r;
    r.period = period;
    r.trend = moving_average_trend(values, ma_window);

    const std::size_t n = values.size();
    std::vector<double> phase_sum(static_cast<std::size_t>(period), 0.0);
    std::vector<int> phase_count(static_cast<std::size_t>(period), 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!r.trend[i]) continue;
        std::size_t phase = i % static_cast<std::size_t>(period);
        phase_sum[phase] += values[i] - *r.trend[i];
        ++phase_count[phase];
    }

    r.seasonal_indices.assign(static_cast<std::size_t>(period), 0.0);
    double mean_index = 0.0;
    for (int p = 0; p < period; ++p) {
        if (phase_count[p] > 0) {
            r.seasonal_indices[p] = phase_sum[p] / static_cast<double>(phase_count[p]);
        }
        mean_index += r.seasonal_indices[p];
    }
    mean_index /= static_cast<double>(period);
    for (double& s : r.seasonal_indices) s -= mean_index; // centred seasonality

    r.seasonal.resize(n);
    r.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.seasonal[i] = r.seasonal_indices[i % static_cast<std::size_t>(period)];
        if (r.trend[i]) {
            r.residual[i] = values[i] - *r.trend[i] - r.seasonal[i];
        }
    }
    return r;
}

void write_decomposition_csv(std::ostream& out, std::chrono::sys_days start,
                             std::span<const double> observed,
                             const DecompositionResult& result) {
    static const std::vector<std::string> header = {"date", "observed", "trend", "seasonal",
                                                    "residual"};
    csv::write_row(out, header);
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    std::vector<std::string> row(5);
    for (std::size_t i = 0; i < observed.size(); ++i) {
        row[0] = format_date(start + std::chrono::days(static_cast<int>(i)));
        row[1] = fmt(observed[i]);
        row[2] = result.trend[i] ? fmt(*result.trend[i]) : "";
        row[3] = fmt(result.seasonal[i]);
        row[4] = result.residual[i] ? fmt(*result.residual[i]) : "";
        csv::write_row(out, row);
    }
}

} // namespace revana
