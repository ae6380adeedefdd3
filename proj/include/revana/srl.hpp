#pragma once

#include "revana/stats.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace revana {

inline constexpr int kSrlItemCount = 25;

struct LikertScale {
    int min_value = 1;
    int max_value = 5;
};

struct SrlResponse {
    std::string student_id;
    std::array<int, kSrlItemCount> item_scores{};
};

/// Dimension means of the questionnaire. Item ranges (1-based):
/// goal setting 1-4, persistence 5-14, effort 15-16, self-efficacy 17-25.
struct SrlScores {
    std::string student_id;
    double goal_setting = 0.0;
    double persistence = 0.0;
    double effort = 0.0;
    double self_efficacy = 0.0;
};

SrlScores score_questionnaire(const SrlResponse& resp, LikertScale scale = {});

/// alpha = k/(k-1) * (1 - sum of item variances / variance of row sums),
/// sample variances with the n-1 denominator. Matrix is students x items.
double cronbach_alpha(const std::vector<std::vector<double>>& item_matrix);

enum class SrlCluster { High, Low };

const char* to_string(SrlCluster c);

struct ClusterAssignment {
    std::string student_id;
    SrlCluster cluster = SrlCluster::Low;
    double centroid_distance = 0.0; // Euclidean, in the clustering space
};

struct KmeansOptions {
    bool standardize = true; // z-score each dimension before clustering
    int restarts = 10;
    int max_iterations = 300;
};

struct KmeansResult {
    std::vector<ClusterAssignment> assignments;
    /// Mean distance of points to their own centroid. Reported as a
    /// non-negative magnitude; some toolchains print it negated.
    double avg_within_centroid_distance = 0.0;
    double within_cluster_sse = 0.0;
    std::array<std::array<double, 4>, 2> centroids{}; // clustering space
};

/// Two-cluster Lloyd's with k-means++ seeding, deterministic for a given
/// seed; restarts keep the lowest within-cluster SSE, ties going to the
/// earliest restart. The cluster with the greater mean of dimension means
/// (on the original scores) is labelled HighSRL.
KmeansResult kmeans_2(std::span<const SrlScores> points, std::uint64_t seed,
                      KmeansOptions opts = {});

/// Chi-square on the 2x2 cohort-by-SRL-level table.
stats::TestResult cluster_proportion_test(std::span<const ClusterAssignment> control,
                                          std::span<const ClusterAssignment> intervention);

/// CSV with header student_id,q1..q25.
std::vector<SrlResponse> read_srl_csv(std::istream& in, LikertScale scale = {});

/// CSV with header student_id,cluster,gs,p,e,se; rows follow input order.
void write_clusters_csv(std::ostream& out, std::span<const ClusterAssignment> assignments,
                        std::span<const SrlScores> scores);

} // namespace revana
