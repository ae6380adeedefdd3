#pragma once

#include "revana/calendar.hpp"
#include "revana/srl.hpp"
#include "revana/stats.hpp"
#include "revana/timeseries.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace revana::report {

struct StudentRecord {
    std::string student_id;
    DailySeries series; // full semester
    RevisionLog log;    // may be empty when only series are known
    std::optional<SrlScores> srl;
    std::optional<SrlCluster> cluster;
    std::optional<double> reflective_score;
};

struct Cohort {
    std::string name;
    std::vector<StudentRecord> students;
};

/// Two cohorts over a shared calendar; student ids must not collide.
struct CohortStudy {
    SemesterCalendar calendar;
    Cohort control;
    Cohort intervention;
};

void check_study(const CohortStudy& study);

enum class Grouping { Cohort, Cluster };

struct ReportOptions {
    /// Summaries report N over nonzero days instead of all window days.
    bool exclude_inactive_days = false;
    stats::ZeroPolicy wilcoxon_zeros = stats::ZeroPolicy::Drop;
    /// Seasonality figures from one whole-semester decomposition instead
    /// of one per half.
    bool whole_semester_decomposition = false;
    /// Seasonality from averaged per-student decompositions instead of the
    /// cohort-average series.
    bool per_student_seasonality = false;
    /// Table 1 from session counts (30-minute idle gap) instead of active
    /// days; requires revision logs in the study.
    bool session_frequency = false;
    /// Drop the optional first week from Table 1 and feature windows.
    bool exclude_week1 = false;
    std::uint64_t kmeans_seed = 1;
};

DailySeries group_average_series(std::span<const StudentRecord> students,
                                 std::string label);

/// Runs kmeans_2 per cohort on students with questionnaire scores and
/// stores the assignments on the records.
void assign_clusters(CohortStudy& study, std::uint64_t seed, KmeansOptions opts = {});

struct FrequencyRow {
    std::string group;
    Period period = Period::H1;
    double no_edit_pct = 0.0;
    double once_pct = 0.0;
    double twice_or_more_pct = 0.0;
    int student_weeks = 0;
};

/// Percentage of student-weeks per editing-frequency category, for each
/// group and semester half. Percentages partition the student-weeks.
std::vector<FrequencyRow> editing_frequency_table(const CohortStudy& study,
                                                  Grouping grouping,
                                                  const ReportOptions& opts = {});

/// Paired signed-rank comparison of a group's cohort-average daily series,
/// H1 day i against H2 day i. All-zero differences surface as a
/// "no-change" result instead of an error.
stats::TestResult within_group_comparison(const CohortStudy& study,
                                          std::span<const StudentRecord> group,
                                          const std::string& group_name,
                                          const ReportOptions& opts = {});

/// Mann-Whitney on the two cohorts' daily-average values within a half.
stats::TestResult between_cohort_comparison(const CohortStudy& study, Period period,
                                            const ReportOptions& opts = {});

struct FeatureCorrelation {
    std::string feature;
    stats::TestResult result;
};

/// Pearson correlation of each of the seven features against reflective
/// scores; ids must match one to one.
std::vector<FeatureCorrelation> feature_correlation_report(
    std::span<const StudentFeatures> features,
    const std::map<std::string, double>& scores_by_id);

struct FeatureComparison {
    std::string feature;
    Period period = Period::H1;
    stats::TestResult result;
};

/// Independent t-tests per count feature (TotalRev, TotalActiveDay,
/// TotalActiveWeek) across cohorts within a half.
std::vector<FeatureComparison> feature_mean_comparison(const CohortStudy& study,
                                                       Period period);

/// Writes per-cohort and per-cluster daily-series plots, seasonality
/// overlays and their raw CSVs. Returns the files written; an empty study
/// writes nothing and returns an explicit notice instead.
struct FigureExport {
    std::vector<std::string> files;
    std::string notice;
};
FigureExport export_figures(const CohortStudy& study, const std::filesystem::path& out_dir,
                            const ReportOptions& opts = {});

/// Full artifact set: table1.csv .. table6.csv, fig2_*.svg .. fig5_*.svg,
/// raw series CSVs and summary.json.
std::vector<std::string> run_full_report(const CohortStudy& study,
                                         const std::filesystem::path& out_dir,
                                         const ReportOptions& opts = {});

nlohmann::json to_json(const stats::TestResult& r);

} // namespace revana::report
