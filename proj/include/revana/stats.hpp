#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace revana::stats {

struct SummaryStats {
    int n = 0;
    double median = 0.0;
    double iqr = 0.0; // Q3 - Q1, linear-interpolation quantiles
    double mean = 0.0;
    double sd = 0.0; // n-1 denominator; 0 by convention for n = 1
};

/// Per-group descriptors attached to a test result, one per sample.
struct GroupSummary {
    std::string name;
    SummaryStats stats;
    std::optional<int> inactive_days; // set for daily-engagement samples
};

struct TestResult {
    std::string test_name;
    double statistic = 0.0; // U, W, chi2, t or r
    std::optional<double> z_value;
    double p_two_tailed = 1.0;
    std::optional<double> effect_size_r;
    std::optional<int> df;
    std::vector<GroupSummary> group_summaries;
    std::string note; // e.g. "no-change" when all paired differences vanish
};

SummaryStats summarize(std::span<const double> sample);

/// Linear-interpolation quantile (the NumPy/R type-7 rule) on sorted data.
double quantile_sorted(std::span<const double> sorted, double q);

/// Midranks for `values`: average ranks over tie groups. `tie_term`
/// accumulates sum(t^3 - t) over tie groups for variance corrections.
std::vector<double> average_ranks(std::span<const double> values, double& tie_term);

enum class ZeroPolicy {
    Drop,  // discard zero differences before ranking
    Pratt, // rank with zeros included, then discard their ranks
};

/// Paired-sample signed-rank test on differences y - x. The normal
/// approximation uses the tie-corrected variance and a half-unit
/// continuity correction; W = min(W+, W-). `effect_size_n` is the
/// pre-pairing observation count across both samples (defaults to
/// x.size() + y.size()); r = |Z| / sqrt(N).
TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                std::optional<int> effect_size_n = std::nullopt,
                                ZeroPolicy zeros = ZeroPolicy::Drop);

/// Two independent samples; U = min(U_a, U_b), tie-corrected sigma,
/// continuity-corrected two-tailed normal p, r = |Z| / sqrt(n1 + n2).
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Sample correlation with a t-distributed significance test, df = n - 2.
TestResult pearson_r(std::span<const double> x, std::span<const double> y);

/// Student's pooled-variance t-test, df = n1 + n2 - 2.
TestResult independent_t_test(std::span<const double> a, std::span<const double> b);

/// Pearson chi-square of independence on an r x c count table, no
/// continuity correction, df = (r-1)(c-1).
TestResult chi_square_independence(const std::vector<std::vector<double>>& table);

/// Significance stars per the usual table notes: ** p<.01, * p<.05.
std::string significance_stars(double p);

} // namespace revana::stats
