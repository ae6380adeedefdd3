#include "revana/srl.hpp"

#include "revana/csv.hpp"
#include "revana/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

namespace revana {

namespace {

using Point = std::array<double, 4>;

double mean_of_items(const SrlResponse& r, int first, int last) {
    double sum = 0.0;
    for (int i = first; i <= last; ++i) sum += r.item_scores[i - 1];
    return sum / static_cast<double>(last - first + 1);
}

double squared_distance(const Point& a, const Point& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

// Uniform double in [0, 1) from the engine's full 64-bit output; avoids
// std::uniform_real_distribution, whose output is implementation-defined.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

struct LloydRun {
    std::array<Point, 2> centroids;
    std::vector<int> labels;
    double sse = std::numeric_limits<double>::infinity();
};

std::array<Point, 2> kmeanspp_seeds(const std::vector<Point>& pts, std::mt19937_64& rng) {
    const std::size_t n = pts.size();
    std::array<Point, 2> seeds;
    std::size_t first = uniform_index(rng, n);
    seeds[0] = pts[first];
    std::vector<double> d2(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d2[i] = squared_distance(pts[i], seeds[0]);
        total += d2[i];
    }
    if (total <= 0.0) {
        seeds[1] = pts[first];
        return seeds;
    }
    double target = uniform01(rng) * total;
    std::size_t chosen = n - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
            chosen = i;
            break;
        }
    }
    seeds[1] = pts[chosen];
    return seeds;
}

LloydRun run_lloyd(const std::vector<Point>& pts, std::array<Point, 2> seeds,
                   int max_iterations) {
    const std::size_t n = pts.size();
    LloydRun run;
    run.labels.assign(n, 0);
    run.centroids = seeds;

    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double d0 = squared_distance(pts[i], run.centroids[0]);
            double d1 = squared_distance(pts[i], run.centroids[1]);
            int label = d1 < d0 ? 1 : 0;
            if (label != run.labels[i]) {
                run.labels[i] = label;
                changed = true;
            }
        }
        std::array<Point, 2> sums{};
        std::array<int, 2> counts{};
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < 4; ++d) sums[run.labels[i]][d] += pts[i][d];
            ++counts[run.labels[i]];
        }
        for (int c = 0; c < 2; ++c) {
            if (counts[c] == 0) {
                // Re-seed an emptied cluster with the point farthest from
                // the surviving centroid.
                int other = 1 - c;
                std::size_t far = 0;
                double best = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = squared_distance(pts[i], run.centroids[other]);
                    if (d > best) {
                        best = d;
                        far = i;
                    }
                }
                run.centroids[c] = pts[far];
                run.labels[far] = c;
                changed = true;
            } else {
                for (std::size_t d = 0; d < 4; ++d) {
                    run.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
                }
            }
        }
        if (!changed && iter > 0) break;
    }

    run.sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        run.sse += squared_distance(pts[i], run.centroids[run.labels[i]]);
    }
    return run;
}

} // namespace

const char* to_string(SrlCluster c) {
    return c == SrlCluster::High ? "high" : "low";
}

SrlScores score_questionnaire(const SrlResponse& resp, LikertScale scale) {
    for (int i = 0; i < kSrlItemCount; ++i) {
        int v = resp.item_scores[i];
        if (v < scale.min_value || v > scale.max_value) {
            raise(ErrorCode::OutOfScaleItem,
                  "item " + std::to_string(i + 1) + " score " + std::to_string(v) +
                      " outside [" + std::to_string(scale.min_value) + ", " +
                      std::to_string(scale.max_value) + "]");
        }
    }
    SrlScores s;
    s.student_id = resp.student_id;
    s.goal_setting = mean_of_items(resp, 1, 4);
    s.persistence = mean_of_items(resp, 5, 14);
    s.effort = mean_of_items(resp, 15, 16);
    s.self_efficacy = mean_of_items(resp, 17, 25);
    return s;
}

double cronbach_alpha(const std::vector<std::vector<double>>& item_matrix) {
    const std::size_t n = item_matrix.size();
    if (n < 2) raise(ErrorCode::InvalidArgument, "cronbach_alpha requires >= 2 students");
    const std::size_t k = item_matrix[0].size();
    if (k < 2) raise(ErrorCode::InvalidArgument, "cronbach_alpha requires >= 2 items");
    for (const auto& row : item_matrix) {
        if (row.size() != k) raise(ErrorCode::InvalidArgument, "ragged item matrix");
    }

    double item_var_sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += item_matrix[i][j];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = item_matrix[i][j] - mean;
            ss += d * d;
        }
        item_var_sum += ss / static_cast<double>(n - 1);
    }

    std::vector<double> totals(n, 0.0);
    double total_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) totals[i] += item_matrix[i][j];
        total_mean += totals[i];
    }
    total_mean /= static_cast<double>(n);
    double total_var = 0.0;
    for (double t : totals) total_var += (t - total_mean) * (t - total_mean);
    total_var /= static_cast<double>(n - 1);
    if (total_var == 0.0) {
        raise(ErrorCode::DegenerateVariance, "total-score variance is zero");
    }
    double kk = static_cast<double>(k);
    return kk / (kk - 1.0) * (1.0 - item_var_sum / total_var);
}

KmeansResult kmeans_2(std::span<const SrlScores> points, std::uint64_t seed,
                      KmeansOptions opts) {
    const std::size_t n = points.size();
    if (n < 2) {
        raise(ErrorCode::TooFewPoints, "k = 2 needs at least 2 points, got " +
                                           std::to_string(n));
    }

    std::vector<Point> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = {points[i].goal_setting, points[i].persistence, points[i].effort,
                  points[i].self_efficacy};
    }
    bool all_identical = std::all_of(raw.begin(), raw.end(),
                                     [&](const Point& p) { return p == raw[0]; });
    if (all_identical) {
        raise(ErrorCode::AllPointsIdentical, "no variation to cluster");
    }

    std::vector<Point> pts = raw;
    if (opts.standardize) {
        for (std::size_t d = 0; d < 4; ++d) {
            double mean = 0.0;
            for (const Point& p : pts) mean += p[d];
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (const Point& p : pts) ss += (p[d] - mean) * (p[d] - mean);
            double sd = std::sqrt(ss / static_cast<double>(n - 1));
            for (Point& p : pts) {
                p[d] = sd > 0.0 ? (p[d] - mean) / sd : 0.0;
            }
        }
    }

    LloydRun best;
    for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(restart));
        LloydRun run = run_lloyd(pts, kmeanspp_seeds(pts, rng), opts.max_iterations);
        if (run.sse < best.sse) best = std::move(run);
    }
    // At desk scale every distinct point pair also seeds a run, which in
    // practice always reaches the optimal 2-partition.
    if (n <= 16) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (pts[i] == pts[j]) continue;
                LloydRun run = run_lloyd(pts, {pts[i], pts[j]}, opts.max_iterations);
                if (run.sse < best.sse) best = std::move(run);
            }
        }
    }

    // Dimension-mean averages on the original scale decide which cluster
    // is the high-SRL one.
    std::array<double, 2> level_sum{};
    std::array<int, 2> level_count{};
    for (std::size_t i = 0; i < n; ++i) {
        double dim_mean = (raw[i][0] + raw[i][1] + raw[i][2] + raw[i][3]) / 4.0;
        level_sum[best.labels[i]] += dim_mean;
        ++level_count[best.labels[i]];
    }
    std::array<double, 2> level_mean{};
    for (int c = 0; c < 2; ++c) {
        level_mean[c] = level_count[c] > 0
                            ? level_sum[c] / static_cast<double>(level_count[c])
                            : -std::numeric_limits<double>::infinity();
    }
    int high_label = level_mean[0] >= level_mean[1] ? 0 : 1;

    KmeansResult result;
    result.centroids = best.centroids;
    result.within_cluster_sse = best.sse;
    result.assignments.reserve(n);
    double dist_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dist = std::sqrt(squared_distance(pts[i], best.centroids[best.labels[i]]));
        dist_sum += dist;
        result.assignments.push_back(
            {points[i].student_id,
             best.labels[i] == high_label ? SrlCluster::High : SrlCluster::Low, dist});
    }
    result.avg_within_centroid_distance = dist_sum / static_cast<double>(n);
    return result;
}

stats::TestResult cluster_proportion_test(std::span<const ClusterAssignment> control,
                                          std::span<const ClusterAssignment> intervention) {
    if (control.empty() || intervention.empty()) {
        raise(ErrorCode::EmptyGroup, "both cohorts need cluster assignments");
    }
    auto counts = [](std::span<const ClusterAssignment> xs) {
        std::vector<double> row(2, 0.0);
        for (const auto& a : xs) row[a.cluster == SrlCluster::High ? 0 : 1] += 1.0;
        return row;
    };
    auto result = stats::chi_square_independence({counts(control), counts(intervention)});
    result.test_name = "cluster_proportion_chi_square";
    return result;
}

std::vector<SrlResponse> read_srl_csv(std::istream& in, LikertScale scale) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) raise(ErrorCode::MissingColumn, "empty SRL input");
    if (row.size() != 1 + kSrlItemCount) {
        raise(ErrorCode::MissingColumn,
              "expected student_id plus 25 item columns, got " + std::to_string(row.size()));
    }

    std::vector<SrlResponse> out;
    while (reader.next(row)) {
        if (row.size() != 1 + kSrlItemCount) {
            raise(ErrorCode::MalformedRow,
                  "line " + std::to_string(reader.record_line()) + ": expected 26 fields");
        }
        SrlResponse r;
        r.student_id = row[0];
        for (int i = 0; i < kSrlItemCount; ++i) {
            const std::string& f = row[i + 1];
            int v = 0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                raise(ErrorCode::MalformedRow, "line " +
                                                   std::to_string(reader.record_line()) +
                                                   ": bad item value '" + f + "'");
            }
            if (v < scale.min_value || v > scale.max_value) {
                raise(ErrorCode::OutOfScaleItem,
                      "line " + std::to_string(reader.record_line()) + ": item " +
                          std::to_string(i + 1) + " out of scale");
            }
            r.item_scores[i] = v;
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_clusters_csv(std::ostream& out, std::span<const ClusterAssignment> assignments,
                        std::span<const SrlScores> scores) {
    if (assignments.size() != scores.size()) {
        raise(ErrorCode::MismatchedIds, "assignments and scores differ in length");
    }
    static const std::vector<std::string> header = {"student_id", "cluster", "gs",
                                                    "p",          "e",       "se"};
    csv::write_row(out, header);
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    std::vector<std::string> row(6);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i].student_id != scores[i].student_id) {
            raise(ErrorCode::MismatchedIds,
                  "row " + std::to_string(i) + ": assignment/score id mismatch");
        }
        row[0] = assignments[i].student_id;
        row[1] = to_string(assignments[i].cluster);
        row[2] = fmt(scores[i].goal_setting);
        row[3] = fmt(scores[i].persistence);
        row[4] = fmt(scores[i].effort);
        row[5] = fmt(scores[i].self_efficacy);
        csv::write_row(out, row);
    }
}

} // namespace revana
