#pragma once

#include <chrono>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace revana {

/// Additive split observed = trend + seasonal + residual. Trend and
/// residual are undefined on the first and last window/2 positions;
/// seasonal is the periodic tiling of the centred seasonal indices.
struct DecompositionResult {
    std::vector<std::optional<double>> trend;
    std::vector<double> seasonal;
    std::vector<std::optional<double>> residual;
    int period = 7;
    /// One index per position in the period, re-centred to sum zero.
    /// Index i applies to series positions with (position mod period) == i;
    /// calendar series start on Mondays, so index 0 is Monday.
    std::vector<double> seasonal_indices;
};

/// Centred moving average; the first and last window/2 values are
/// undefined rather than extrapolated.
std::vector<std::optional<double>> moving_average_trend(std::span<const double> values,
                                                        int window = 7);

DecompositionResult seasonal_decompose_additive(std::span<const double> values,
                                                int period = 7);

/// CSV with columns date,observed,trend,seasonal,residual; undefined
/// values become empty cells.
void write_decomposition_csv(std::ostream& out, std::chrono::sys_days start,
                             std::span<const double> observed,
                             const DecompositionResult& result);

} // namespace revana
