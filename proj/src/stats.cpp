#include "revana/stats.hpp"

#include "revana/distributions.hpp"
#include "revana/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace revana::stats {

namespace {

double sample_mean(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(xs.size() - 1);
}

GroupSummary make_summary(const std::string& name, std::span<const double> sample) {
    return GroupSummary{name, summarize(sample), std::nullopt};
}

} // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) raise(ErrorCode::EmptySample, "quantile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    if (lo >= sorted.size() - 1) return sorted.back();
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SummaryStats summarize(std::span<const double> sample) {
    if (sample.empty()) raise(ErrorCode::EmptySample, "summarize requires n >= 1");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    SummaryStats s;
    s.n = static_cast<int>(sample.size());
    s.median = quantile_sorted(sorted, 0.5);
    s.iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    s.mean = sample_mean(sample);
    s.sd = std::sqrt(sample_variance(sample, s.mean));
    return s;
}

std::vector<double> average_ranks(std::span<const double> values, double& tie_term) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

    std::vector<double> ranks(n, 0.0);
    tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        double t = static_cast<double>(j - i + 1);
        if (t > 1.0) tie_term += t * t * t - t;
        i = j + 1;
    }
    return ranks;
}

TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                std::optional<int> effect_size_n, ZeroPolicy zeros) {
    if (x.size() != y.size()) {
        raise(ErrorCode::InvalidArgument, "wilcoxon_signed_rank requires paired samples");
    }
    std::vector<double> diffs;
    diffs.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diffs.push_back(y[i] - x[i]);

    std::vector<double> abs_d;
    std::vector<int> signs; // 0 marks a zero difference kept under Pratt
    for (double d : diffs) {
        if (d == 0.0 && zeros == ZeroPolicy::Drop) continue;
        abs_d.push_back(std::fabs(d));
        signs.push_back(d > 0.0 ? 1 : (d < 0.0 ? -1 : 0));
    }
    std::size_t nonzero = 0;
    for (int s : signs) nonzero += (s != 0);
    if (nonzero == 0) {
        raise(ErrorCode::AllZeroDifferences, "all paired differences are zero");
    }
    if (nonzero < 5) {
        raise(ErrorCode::TooFewPairs,
              "need >= 5 nonzero pairs, got " + std::to_string(nonzero));
    }

    double tie_term = 0.0;
    std::vector<double> ranks = average_ranks(abs_d, tie_term);

    double w_plus = 0.0, w_minus = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (signs[i] > 0) w_plus += ranks[i];
        else if (signs[i] < 0) w_minus += ranks[i];
    }
    double m = static_cast<double>(ranks.size()); // includes zeros under Pratt
    double w = std::min(w_plus, w_minus);
    double mean_w = m * (m + 1.0) / 4.0;
    double var_w = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - tie_term / 48.0;
    if (zeros == ZeroPolicy::Pratt) {
        // Remove the zero block's contribution to the null mean/variance.
        double z0 = static_cast<double>(ranks.size() - nonzero);
        mean_w -= z0 * (z0 + 1.0) / 4.0;
        var_w -= z0 * (z0 + 1.0) * (2.0 * z0 + 1.0) / 24.0;
    }
    if (var_w <= 0.0) {
        raise(ErrorCode::DegenerateVariance, "signed-rank variance collapsed to zero");
    }
    // Half-unit continuity correction toward the mean; keeps the normal
    // approximation within 0.05 of the exact small-sample distribution.
    double correction = w < mean_w ? 0.5 : 0.0;
    double z = (w - mean_w + correction) / std::sqrt(var_w);

    TestResult r;
    r.test_name = "wilcoxon_signed_rank";
    r.statistic = w;
    r.z_value = z;
    r.p_two_tailed = dist::two_tailed_p_from_z(z);
    int total_n = effect_size_n.value_or(static_cast<int>(x.size() + y.size()));
    r.effect_size_r = std::fabs(z) / std::sqrt(static_cast<double>(total_n));
    r.group_summaries.push_back(make_summary("first", x));
    r.group_summaries.push_back(make_summary("second", y));
    return r;
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 3 || b.size() < 3) {
        raise(ErrorCode::EmptySample,
              "mann_whitney_u requires both samples to have n >= 3");
    }
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double n = n1 + n2;

    std::vector<double> combined(a.begin(), a.end());
    combined.insert(combined.end(), b.begin(), b.end());
    double tie_term = 0.0;
    std::vector<double> ranks = average_ranks(combined, tie_term);

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) rank_sum_a += ranks[i];
    double u_a = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    double u_b = n1 * n2 - u_a;
    double u = std::min(u_a, u_b);

    double var_u = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var_u <= 0.0) {
        raise(ErrorCode::DegenerateVariance, "all observations tied across both samples");
    }
    double mean_u = n1 * n2 / 2.0;
    double correction = u < mean_u ? 0.5 : 0.0;
    double z = (u - mean_u + correction) / std::sqrt(var_u);

    TestResult r;
    r.test_name = "mann_whitney_u";
    r.statistic = u;
    r.z_value = z;
    r.p_two_tailed = dist::two_tailed_p_from_z(z);
    r.effect_size_r = std::fabs(z) / std::sqrt(n);
    r.group_summaries.push_back(make_summary("a", a));
    r.group_summaries.push_back(make_summary("b", b));
    return r;
}

TestResult pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        raise(ErrorCode::InvalidArgument, "pearson_r requires equal-length samples");
    }
    if (x.size() < 3) {
        raise(ErrorCode::InvalidArgument, "pearson_r requires n >= 3");
    }
    const double n = static_cast<double>(x.size());
    double mx = sample_mean(x);
    double my = sample_mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        raise(ErrorCode::ZeroVariance, "pearson_r requires nonzero variance in both samples");
    }
    double rho = sxy / std::sqrt(sxx * syy);
    rho = std::clamp(rho, -1.0, 1.0);

    TestResult r;
    r.test_name = "pearson_r";
    r.statistic = rho;
    r.df = static_cast<int>(n) - 2;
    r.effect_size_r = std::fabs(rho);
    if (std::fabs(rho) >= 1.0) {
        r.p_two_tailed = 0.0;
    } else {
        double t = rho * std::sqrt((n - 2.0) / (1.0 - rho * rho));
        r.p_two_tailed = dist::two_tailed_p_from_t(t, n - 2.0);
    }
    r.group_summaries.push_back(make_summary("x", x));
    r.group_summaries.push_back(make_summary("y", y));
    return r;
}

TestResult independent_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        raise(ErrorCode::InvalidArgument, "independent_t_test requires both n >= 2");
    }
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    double m1 = sample_mean(a);
    double m2 = sample_mean(b);
    double v1 = sample_variance(a, m1);
    double v2 = sample_variance(b, m2);
    double df = n1 + n2 - 2.0;
    double pooled = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / df;

    TestResult r;
    r.test_name = "independent_t_test";
    r.df = static_cast<int>(df);
    if (pooled == 0.0) {
        if (m1 != m2) {
            raise(ErrorCode::DegenerateVariance,
                  "both groups have zero variance and different means");
        }
        r.statistic = 0.0;
        r.p_two_tailed = 1.0;
    } else {
        double se = std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
        r.statistic = (m1 - m2) / se;
        r.p_two_tailed = dist::two_tailed_p_from_t(r.statistic, df);
    }
    r.group_summaries.push_back(make_summary("a", a));
    r.group_summaries.push_back(make_summary("b", b));
    return r;
}

TestResult chi_square_independence(const std::vector<std::vector<double>>& table) {
    if (table.empty() || table[0].empty()) {
        raise(ErrorCode::InvalidArgument, "chi_square_independence requires a nonempty table");
    }
    const std::size_t rows = table.size();
    const std::size_t cols = table[0].size();
    if (rows < 2 || cols < 2) {
        raise(ErrorCode::InvalidArgument, "chi_square_independence requires at least 2x2");
    }
    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (table[i].size() != cols) {
            raise(ErrorCode::InvalidArgument, "ragged contingency table");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            double c = table[i][j];
            if (c < 0.0) raise(ErrorCode::InvalidArgument, "negative count in table");
            row_sum[i] += c;
            col_sum[j] += c;
            total += c;
        }
    }
    for (double s : row_sum) {
        if (s == 0.0) raise(ErrorCode::ZeroMarginal, "zero row marginal");
    }
    for (double s : col_sum) {
        if (s == 0.0) raise(ErrorCode::ZeroMarginal, "zero column marginal");
    }

    double chi2 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            double expected = row_sum[i] * col_sum[j] / total;
            double d = table[i][j] - expected;
            chi2 += d * d / expected;
        }
    }
    int df = static_cast<int>((rows - 1) * (cols - 1));

    TestResult r;
    r.test_name = "chi_square_independence";
    r.statistic = chi2;
    r.df = df;
    r.p_two_tailed = dist::chi_square_sf(chi2, static_cast<double>(df));
    return r;
}

std::string significance_stars(double p) {
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

} // namespace revana::stats
