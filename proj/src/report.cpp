#include "revana/report.hpp"

#include "revana/csv.hpp"
#include "revana/errors.hpp"
#include "revana/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

namespace revana::report {

namespace {

namespace fs = std::filesystem;

constexpr const char* kBlue = "#1f77b4";
constexpr const char* kRed = "#d62728";
constexpr const char* kCyan = "#17becf";
constexpr const char* kOrange = "#ff7f0e";

std::string fmt(double v, const char* spec = "%.4f") {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

bool day_inactive(const DailySeries& s, int d) {
    return s.chars[d] == 0.0 && s.revisions[d] == 0;
}

/// Md/IQR/N descriptors for a window of a cohort-average series. With
/// exclusion on, N counts only days with any activity; the inactive-day
/// count is always reported alongside.
stats::GroupSummary engagement_summary(const std::string& name, const DailySeries& window_series,
                                       bool exclude_inactive) {
    int inactive = 0;
    std::vector<double> included;
    included.reserve(window_series.chars.size());
    for (int d = 0; d < window_series.days(); ++d) {
        if (day_inactive(window_series, d)) ++inactive;
    }
    for (int d = 0; d < window_series.days(); ++d) {
        if (exclude_inactive && day_inactive(window_series, d)) continue;
        included.push_back(window_series.chars[d]);
    }
    if (included.empty()) included = window_series.chars; // fully inactive window
    stats::GroupSummary g;
    g.name = name;
    g.stats = stats::summarize(included);
    g.inactive_days = inactive;
    return g;
}

std::vector<const StudentRecord*> cluster_members(const Cohort& cohort, SrlCluster level) {
    std::vector<const StudentRecord*> out;
    for (const StudentRecord& s : cohort.students) {
        if (s.cluster && *s.cluster == level) out.push_back(&s);
    }
    return out;
}

DailySeries average_of(const std::vector<const StudentRecord*>& members,
                       const std::string& label) {
    if (members.empty()) raise(ErrorCode::EmptyGroup, label + " has no students");
    std::vector<DailySeries> series;
    series.reserve(members.size());
    for (const StudentRecord* s : members) series.push_back(s->series);
    return cohort_daily_average(series, label);
}

struct GroupSpec {
    std::string name;
    std::vector<const StudentRecord*> members;
};

std::vector<GroupSpec> make_groups(const CohortStudy& study, Grouping grouping) {
    std::vector<GroupSpec> groups;
    auto whole = [](const Cohort& c) {
        std::vector<const StudentRecord*> ptrs;
        ptrs.reserve(c.students.size());
        for (const StudentRecord& s : c.students) ptrs.push_back(&s);
        return ptrs;
    };
    if (grouping == Grouping::Cohort) {
        groups.push_back({study.control.name, whole(study.control)});
        groups.push_back({study.intervention.name, whole(study.intervention)});
    } else {
        for (const Cohort* c : {&study.control, &study.intervention}) {
            groups.push_back({c->name + "/high", cluster_members(*c, SrlCluster::High)});
            groups.push_back({c->name + "/low", cluster_members(*c, SrlCluster::Low)});
        }
    }
    return groups;
}

std::vector<double> seasonal_indices_for(const std::vector<const StudentRecord*>& members,
                                         const std::string& label, DayWindow w,
                                         const ReportOptions& opts) {
    if (opts.per_student_seasonality) {
        // Mean of per-student decompositions rather than decomposition of
        // the mean series.
        std::vector<double> acc(7, 0.0);
        for (const StudentRecord* s : members) {
            DailySeries sliced = slice(s->series, w);
            DecompositionResult d = seasonal_decompose_additive(sliced.chars, 7);
            for (int i = 0; i < 7; ++i) acc[i] += d.seasonal_indices[i];
        }
        for (double& v : acc) v /= static_cast<double>(members.size());
        return acc;
    }
    DailySeries avg = average_of(members, label);
    DailySeries sliced = slice(avg, w);
    DecompositionResult d = seasonal_decompose_additive(sliced.chars, 7);
    return d.seasonal_indices;
}

void write_text_file(const fs::path& path, const std::string& contents,
                     std::vector<std::string>& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::Io, "cannot write " + path.string());
    out << contents;
    manifest.push_back(path.filename().string());
}

void write_series_csv(const fs::path& path, const DailySeries& s,
                      std::vector<std::string>& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::Io, "cannot write " + path.string());
    static const std::vector<std::string> header = {"date", "chars", "revisions"};
    csv::write_row(out, header);
    std::vector<std::string> row(3);
    for (int d = 0; d < s.days(); ++d) {
        row[0] = format_date(s.start + std::chrono::days(d));
        row[1] = fmt(s.chars[d], "%.6f");
        row[2] = std::to_string(s.revisions[d]);
        csv::write_row(out, row);
    }
    manifest.push_back(path.filename().string());
}

svg::LineChart seasonality_chart(const std::string& title) {
    svg::LineChart chart;
    chart.title = title;
    chart.x_label = "Day of week (1 = Monday)";
    chart.y_label = "Seasonal index (chars/day)";
    chart.x_gridlines = {1, 2, 3, 4, 5, 6, 7};
    chart.zero_line = true;
    return chart;
}

svg::LineChart series_chart(const std::string& title, int days) {
    svg::LineChart chart;
    chart.title = title;
    chart.x_label = "Day (vertical lines mark Mondays)";
    chart.y_label = "Average edited characters per day";
    for (int d = 1; d <= days; d += 7) chart.x_gridlines.push_back(d);
    chart.x_gridlines.push_back(days);
    return chart;
}

} // namespace

void check_study(const CohortStudy& study) {
    std::set<std::string> ids;
    for (const Cohort* c : {&study.control, &study.intervention}) {
        for (const StudentRecord& s : c->students) {
            if (!ids.insert(s.student_id).second) {
                raise(ErrorCode::InvalidArgument,
                      "duplicate student id across cohorts: " + s.student_id);
            }
            if (s.series.days() != study.calendar.day_count()) {
                raise(ErrorCode::InvalidArgument,
                      "series length mismatch for " + s.student_id);
            }
        }
    }
}

DailySeries group_average_series(std::span<const StudentRecord> students,
                                 std::string label) {
    if (students.empty()) raise(ErrorCode::EmptyGroup, label + " has no students");
    std::vector<DailySeries> series;
    series.reserve(students.size());
    for (const StudentRecord& s : students) series.push_back(s.series);
    return cohort_daily_average(series, std::move(label));
}

void assign_clusters(CohortStudy& study, std::uint64_t seed, KmeansOptions opts) {
    for (Cohort* cohort : {&study.control, &study.intervention}) {
        std::vector<SrlScores> scores;
        std::vector<StudentRecord*> with_srl;
        for (StudentRecord& s : cohort->students) {
            if (s.srl) {
                scores.push_back(*s.srl);
                with_srl.push_back(&s);
            }
        }
        if (scores.size() < 2) continue;
        KmeansResult result = kmeans_2(scores, seed, opts);
        for (std::size_t i = 0; i < with_srl.size(); ++i) {
            with_srl[i]->cluster = result.assignments[i].cluster;
        }
    }
}

std::vector<FrequencyRow> editing_frequency_table(const CohortStudy& study,
                                                  Grouping grouping,
                                                  const ReportOptions& opts) {
    std::vector<FrequencyRow> rows;
    for (const GroupSpec& group : make_groups(study, grouping)) {
        if (group.members.empty()) {
            // An empty cohort is a caller error; an empty cluster subgroup
            // just has no row.
            if (grouping == Grouping::Cohort) raise(ErrorCode::EmptyGroup, group.name);
            continue;
        }
        for (Period period : {Period::H1, Period::H2}) {
            int counts[3] = {0, 0, 0};
            int total = 0;
            for (const StudentRecord* s : group.members) {
                std::vector<WeeklyEditCategory> cats;
                if (opts.session_frequency) {
                    if (s->log.events.empty() && s->series.revisions !=
                        std::vector<std::int64_t>(s->series.revisions.size(), 0)) {
                        raise(ErrorCode::InvalidArgument,
                              "session frequency needs revision logs");
                    }
                    cats = weekly_session_categories(s->log, study.calendar, period);
                } else {
                    cats = weekly_edit_categories(s->series, study.calendar, period);
                }
                for (const WeeklyEditCategory& c : cats) {
                    if (opts.exclude_week1 && c.week == 1) continue;
                    ++counts[static_cast<int>(c.category)];
                    ++total;
                }
            }
            FrequencyRow row;
            row.group = group.name;
            row.period = period;
            row.student_weeks = total;
            if (total > 0) {
                row.no_edit_pct = 100.0 * counts[0] / total;
                row.once_pct = 100.0 * counts[1] / total;
                row.twice_or_more_pct = 100.0 * counts[2] / total;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

stats::TestResult within_group_comparison(const CohortStudy& study,
                                          std::span<const StudentRecord> group,
                                          const std::string& group_name,
                                          const ReportOptions& opts) {
    DailySeries avg = group_average_series(group, group_name);
    DailySeries h1 = slice(avg, window(study.calendar, Period::H1));
    DailySeries h2 = slice(avg, window(study.calendar, Period::H2));

    stats::GroupSummary s1 =
        engagement_summary(group_name + " " + to_string(Period::H1), h1,
                           opts.exclude_inactive_days);
    stats::GroupSummary s2 =
        engagement_summary(group_name + " " + to_string(Period::H2), h2,
                           opts.exclude_inactive_days);

    // Pairing is by day index within the half: H1 day i against H2 day i.
    int pairs = std::min(h1.days(), h2.days());
    std::vector<double> x(h1.chars.begin(), h1.chars.begin() + pairs);
    std::vector<double> y(h2.chars.begin(), h2.chars.begin() + pairs);

    stats::TestResult result;
    try {
        result = stats::wilcoxon_signed_rank(x, y, s1.stats.n + s2.stats.n,
                                             opts.wilcoxon_zeros);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::AllZeroDifferences) throw;
        result.test_name = "wilcoxon_signed_rank";
        result.statistic = 0.0;
        result.z_value = 0.0;
        result.p_two_tailed = 1.0;
        result.effect_size_r = 0.0;
        result.note = "no-change";
    }
    result.group_summaries = {s1, s2};
    return result;
}

stats::TestResult between_cohort_comparison(const CohortStudy& study, Period period,
                                            const ReportOptions& opts) {
    DayWindow w = window(study.calendar, period);
    DailySeries control =
        slice(group_average_series(study.control.students, study.control.name), w);
    DailySeries intervention =
        slice(group_average_series(study.intervention.students, study.intervention.name), w);

    stats::GroupSummary s1 = engagement_summary(study.control.name + " " + to_string(period),
                                                control, opts.exclude_inactive_days);
    stats::GroupSummary s2 =
        engagement_summary(study.intervention.name + " " + to_string(period), intervention,
                           opts.exclude_inactive_days);

    auto sample = [&](const DailySeries& s) {
        std::vector<double> v;
        for (int d = 0; d < s.days(); ++d) {
            if (opts.exclude_inactive_days && day_inactive(s, d)) continue;
            v.push_back(s.chars[d]);
        }
        if (v.empty()) v = s.chars;
        return v;
    };
    stats::TestResult result = stats::mann_whitney_u(sample(control), sample(intervention));
    result.group_summaries = {s1, s2};
    return result;
}

std::vector<FeatureCorrelation> feature_correlation_report(
    std::span<const StudentFeatures> features,
    const std::map<std::string, double>& scores_by_id) {
    if (features.size() != scores_by_id.size()) {
        raise(ErrorCode::MismatchedIds,
              "features for " + std::to_string(features.size()) + " students, scores for " +
                  std::to_string(scores_by_id.size()));
    }
    if (features.size() < 3) {
        raise(ErrorCode::InvalidArgument, "correlation needs at least 3 students");
    }
    std::vector<double> scores;
    scores.reserve(features.size());
    for (const StudentFeatures& f : features) {
        auto it = scores_by_id.find(f.student_id);
        if (it == scores_by_id.end()) {
            raise(ErrorCode::MismatchedIds, "no score for student " + f.student_id);
        }
        scores.push_back(it->second);
    }

    using Extract = double (*)(const StudentFeatures&);
    static const std::pair<const char*, Extract> kFeatures[] = {
        {"TotalRev", [](const StudentFeatures& f) { return static_cast<double>(f.total_rev); }},
        {"AvgStrCountPerDay", [](const StudentFeatures& f) { return f.avg_str_count_per_day; }},
        {"AvgRevPerDay", [](const StudentFeatures& f) { return f.avg_rev_per_day; }},
        {"TotalActiveDay",
         [](const StudentFeatures& f) { return static_cast<double>(f.total_active_day); }},
        {"AvgStrCountPerWeek",
         [](const StudentFeatures& f) { return f.avg_str_count_per_week; }},
        {"AvgRevPerWeek", [](const StudentFeatures& f) { return f.avg_rev_per_week; }},
        {"TotalActiveWeek",
         [](const StudentFeatures& f) { return static_cast<double>(f.total_active_week); }},
    };

    std::vector<FeatureCorrelation> out;
    out.reserve(7);
    for (const auto& [name, extract] : kFeatures) {
        std::vector<double> x;
        x.reserve(features.size());
        for (const StudentFeatures& f : features) x.push_back(extract(f));
        FeatureCorrelation fc;
        fc.feature = name;
        try {
            fc.result = stats::pearson_r(x, scores);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroVariance) throw;
            // A constant feature has no defined correlation; keep the row
            // so the table still lists all seven features.
            fc.result.test_name = "pearson_r";
            fc.result.statistic = std::numeric_limits<double>::quiet_NaN();
            fc.result.p_two_tailed = std::numeric_limits<double>::quiet_NaN();
            fc.result.note = "zero-variance feature";
        }
        out.push_back(std::move(fc));
    }
    return out;
}

std::vector<FeatureComparison> feature_mean_comparison(const CohortStudy& study,
                                                       Period period) {
    auto collect = [&](const Cohort& cohort) {
        std::vector<StudentFeatures> out;
        out.reserve(cohort.students.size());
        for (const StudentRecord& s : cohort.students) {
            out.push_back(student_features(s.series, study.calendar, period));
        }
        return out;
    };
    std::vector<StudentFeatures> control = collect(study.control);
    std::vector<StudentFeatures> intervention = collect(study.intervention);
    if (control.empty() || intervention.empty()) {
        raise(ErrorCode::EmptyGroup, "both cohorts need students");
    }

    using Extract = double (*)(const StudentFeatures&);
    static const std::pair<const char*, Extract> kFeatures[] = {
        {"TotalRev", [](const StudentFeatures& f) { return static_cast<double>(f.total_rev); }},
        {"TotalActiveDay",
         [](const StudentFeatures& f) { return static_cast<double>(f.total_active_day); }},
        {"TotalActiveWeek",
         [](const StudentFeatures& f) { return static_cast<double>(f.total_active_week); }},
    };

    std::vector<FeatureComparison> out;
    for (const auto& [name, extract] : kFeatures) {
        std::vector<double> a, b;
        a.reserve(control.size());
        b.reserve(intervention.size());
        for (const StudentFeatures& f : control) a.push_back(extract(f));
        for (const StudentFeatures& f : intervention) b.push_back(extract(f));
        FeatureComparison fc;
        fc.feature = name;
        fc.period = period;
        fc.result = stats::independent_t_test(a, b);
        out.push_back(std::move(fc));
    }
    return out;
}

FigureExport export_figures(const CohortStudy& study, const fs::path& out_dir,
                            const ReportOptions& opts) {
    FigureExport exported;
    if (study.control.students.empty() && study.intervention.students.empty()) {
        exported.notice = "empty study: no figures exported";
        return exported;
    }
    fs::create_directories(out_dir);

    std::vector<GroupSpec> cohorts = make_groups(study, Grouping::Cohort);
    DayWindow h1 = window(study.calendar, Period::H1);
    DayWindow h2 = window(study.calendar, Period::H2);

    // Figure 2 analog: cohort-average daily series per half.
    std::vector<std::pair<const char*, DayWindow>> halves = {{"h1", h1}, {"h2", h2}};
    std::vector<DailySeries> cohort_avgs;
    for (const GroupSpec& g : cohorts) cohort_avgs.push_back(average_of(g.members, g.name));
    for (const auto& [suffix, w] : halves) {
        svg::LineChart chart =
            series_chart(std::string("Cohort daily engagement (") + suffix + ")", w.day_count);
        chart.series.push_back({cohorts[0].name, kBlue, slice(cohort_avgs[0], w).chars});
        chart.series.push_back({cohorts[1].name, kRed, slice(cohort_avgs[1], w).chars});
        write_text_file(out_dir / (std::string("fig2_") + suffix + ".svg"), chart.render(),
                        exported.files);
    }
    for (std::size_t i = 0; i < cohorts.size(); ++i) {
        write_series_csv(out_dir / ("series_" + cohorts[i].name + ".csv"), cohort_avgs[i],
                         exported.files);
    }

    // Figure 3 analog: per-cohort weekly seasonality, halves overlaid.
    for (const GroupSpec& g : cohorts) {
        svg::LineChart chart = seasonality_chart("Weekly seasonality: " + g.name);
        if (opts.whole_semester_decomposition) {
            chart.series.push_back(
                {"full semester", kBlue,
                 seasonal_indices_for(g.members, g.name, window(study.calendar, Period::Full),
                                      opts)});
        } else {
            chart.series.push_back(
                {"h1", kBlue, seasonal_indices_for(g.members, g.name, h1, opts)});
            chart.series.push_back(
                {"h2", kRed, seasonal_indices_for(g.members, g.name, h2, opts)});
        }
        write_text_file(out_dir / ("fig3_" + g.name + ".svg"), chart.render(),
                        exported.files);
    }

    // Cluster-level figures need assignments on both cohorts.
    bool have_clusters = false;
    for (const Cohort* c : {&study.control, &study.intervention}) {
        for (const StudentRecord& s : c->students) have_clusters |= s.cluster.has_value();
    }
    if (have_clusters) {
        std::vector<GroupSpec> clusters = make_groups(study, Grouping::Cluster);
        static const char* kClusterColors[] = {kBlue, kCyan, kRed, kOrange};
        for (const auto& [suffix, w] : halves) {
            svg::LineChart chart = series_chart(
                std::string("Cluster daily engagement (") + suffix + ")", w.day_count);
            bool any = false;
            for (std::size_t i = 0; i < clusters.size(); ++i) {
                if (clusters[i].members.empty()) continue;
                chart.series.push_back(
                    {clusters[i].name, kClusterColors[i % 4],
                     slice(average_of(clusters[i].members, clusters[i].name), w).chars});
                any = true;
            }
            if (any) {
                write_text_file(out_dir / (std::string("fig4_") + suffix + ".svg"),
                                chart.render(), exported.files);
            }
        }
        for (const GroupSpec& g : clusters) {
            if (g.members.empty()) continue;
            svg::LineChart chart = seasonality_chart("Weekly seasonality: " + g.name);
            if (opts.whole_semester_decomposition) {
                chart.series.push_back(
                    {"full semester", kBlue,
                     seasonal_indices_for(g.members, g.name,
                                          window(study.calendar, Period::Full), opts)});
            } else {
                chart.series.push_back(
                    {"h1", kBlue, seasonal_indices_for(g.members, g.name, h1, opts)});
                chart.series.push_back(
                    {"h2", kRed, seasonal_indices_for(g.members, g.name, h2, opts)});
            }
            std::string name = g.name;
            std::replace(name.begin(), name.end(), '/', '_');
            write_text_file(out_dir / ("fig5_" + name + ".svg"), chart.render(),
                            exported.files);
        }
    }

    // Raw decomposition exports backing the seasonality plots.
    for (std::size_t i = 0; i < cohorts.size(); ++i) {
        for (const auto& [suffix, w] : halves) {
            DailySeries sliced = slice(cohort_avgs[i], w);
            DecompositionResult d = seasonal_decompose_additive(sliced.chars, 7);
            fs::path path =
                out_dir / ("decomposition_" + cohorts[i].name + "_" + suffix + ".csv");
            std::ofstream out(path, std::ios::binary);
            if (!out) raise(ErrorCode::Io, "cannot write " + path.string());
            write_decomposition_csv(out, sliced.start, sliced.chars, d);
            exported.files.push_back(path.filename().string());
        }
    }
    return exported;
}

nlohmann::json to_json(const stats::TestResult& r) {
    nlohmann::json j;
    j["test"] = r.test_name;
    j["statistic"] = r.statistic;
    if (r.z_value) j["z"] = *r.z_value;
    j["p_two_tailed"] = r.p_two_tailed;
    if (r.effect_size_r) j["effect_size_r"] = *r.effect_size_r;
    if (r.df) j["df"] = *r.df;
    if (!r.note.empty()) j["note"] = r.note;
    j["stars"] = stats::significance_stars(r.p_two_tailed);
    nlohmann::json groups = nlohmann::json::array();
    for (const stats::GroupSummary& g : r.group_summaries) {
        nlohmann::json jg;
        jg["name"] = g.name;
        jg["n"] = g.stats.n;
        jg["median"] = g.stats.median;
        jg["iqr"] = g.stats.iqr;
        jg["mean"] = g.stats.mean;
        jg["sd"] = g.stats.sd;
        if (g.inactive_days) jg["inactive_days"] = *g.inactive_days;
        groups.push_back(std::move(jg));
    }
    j["group_summaries"] = std::move(groups);
    return j;
}

std::vector<std::string> run_full_report(const CohortStudy& study, const fs::path& out_dir,
                                         const ReportOptions& opts) {
    check_study(study);
    std::vector<std::string> manifest;
    if (study.control.students.empty() || study.intervention.students.empty()) {
        raise(ErrorCode::EmptyGroup, "full report needs students in both cohorts");
    }
    fs::create_directories(out_dir);
    nlohmann::json summary;
    summary["options"] = {
        {"exclude_inactive_days", opts.exclude_inactive_days},
        {"wilcoxon_zeros", opts.wilcoxon_zeros == stats::ZeroPolicy::Drop ? "drop" : "pratt"},
        {"whole_semester_decomposition", opts.whole_semester_decomposition},
        {"per_student_seasonality", opts.per_student_seasonality},
        {"session_frequency", opts.session_frequency},
        {"exclude_week1", opts.exclude_week1},
    };

    bool have_clusters = false;
    for (const Cohort* c : {&study.control, &study.intervention}) {
        for (const StudentRecord& s : c->students) have_clusters |= s.cluster.has_value();
    }

    // Table 1: editing-frequency percentages, cohorts first, clusters after
    // when assignments exist.
    {
        std::ofstream out(out_dir / "table1.csv", std::ios::binary);
        static const std::vector<std::string> header = {
            "group", "period", "no_edit_pct", "once_pct", "twice_or_more_pct",
            "student_weeks"};
        csv::write_row(out, header);
        auto emit = [&](const std::vector<FrequencyRow>& rows) {
            std::vector<std::string> row(6);
            for (const FrequencyRow& r : rows) {
                row[0] = r.group;
                row[1] = to_string(r.period);
                row[2] = fmt(r.no_edit_pct, "%.2f");
                row[3] = fmt(r.once_pct, "%.2f");
                row[4] = fmt(r.twice_or_more_pct, "%.2f");
                row[5] = std::to_string(r.student_weeks);
                csv::write_row(out, row);
            }
        };
        std::vector<FrequencyRow> cohort_rows =
            editing_frequency_table(study, Grouping::Cohort, opts);
        emit(cohort_rows);
        nlohmann::json jrows = nlohmann::json::array();
        auto row_json = [](const FrequencyRow& r) {
            return nlohmann::json{{"group", r.group},
                                  {"period", to_string(r.period)},
                                  {"no_edit_pct", r.no_edit_pct},
                                  {"once_pct", r.once_pct},
                                  {"twice_or_more_pct", r.twice_or_more_pct},
                                  {"student_weeks", r.student_weeks}};
        };
        for (const FrequencyRow& r : cohort_rows) jrows.push_back(row_json(r));
        if (have_clusters) {
            std::vector<FrequencyRow> cluster_rows =
                editing_frequency_table(study, Grouping::Cluster, opts);
            emit(cluster_rows);
            for (const FrequencyRow& r : cluster_rows) jrows.push_back(row_json(r));
        }
        summary["table1"] = std::move(jrows);
        manifest.push_back("table1.csv");
    }

    auto write_within_table = [&](const std::string& filename,
                                  const std::vector<std::pair<std::string,
                                                              stats::TestResult>>& results) {
        std::ofstream out(out_dir / filename, std::ios::binary);
        static const std::vector<std::string> header = {
            "group", "n_h1", "inactive_days_h1", "median_h1", "iqr_h1",
            "n_h2",  "inactive_days_h2", "median_h2", "iqr_h2",
            "z",     "p",    "effect_size_r", "stars"};
        csv::write_row(out, header);
        std::vector<std::string> row(13);
        for (const auto& [group, r] : results) {
            const auto& s1 = r.group_summaries.at(0);
            const auto& s2 = r.group_summaries.at(1);
            row[0] = group;
            row[1] = std::to_string(s1.stats.n);
            row[2] = std::to_string(s1.inactive_days.value_or(0));
            row[3] = fmt(s1.stats.median);
            row[4] = fmt(s1.stats.iqr);
            row[5] = std::to_string(s2.stats.n);
            row[6] = std::to_string(s2.inactive_days.value_or(0));
            row[7] = fmt(s2.stats.median);
            row[8] = fmt(s2.stats.iqr);
            row[9] = fmt(r.z_value.value_or(0.0));
            row[10] = fmt(r.p_two_tailed, "%.6f");
            row[11] = fmt(r.effect_size_r.value_or(0.0));
            row[12] = stats::significance_stars(r.p_two_tailed);
            csv::write_row(out, row);
        }
        manifest.push_back(filename);
    };

    // Table 2: within-cohort H1 vs H2.
    {
        std::vector<std::pair<std::string, stats::TestResult>> results;
        results.emplace_back(study.control.name,
                             within_group_comparison(study, study.control.students,
                                                     study.control.name, opts));
        results.emplace_back(study.intervention.name,
                             within_group_comparison(study, study.intervention.students,
                                                     study.intervention.name, opts));
        write_within_table("table2.csv", results);
        nlohmann::json j = nlohmann::json::array();
        for (const auto& [group, r] : results) {
            nlohmann::json e = to_json(r);
            e["group"] = group;
            j.push_back(std::move(e));
        }
        summary["table2"] = std::move(j);
    }

    // Table 3: between-cohort Mann-Whitney per half.
    {
        std::ofstream out(out_dir / "table3.csv", std::ios::binary);
        static const std::vector<std::string> header = {
            "period", "n_control", "inactive_days_control", "median_control", "iqr_control",
            "n_intervention", "inactive_days_intervention", "median_intervention",
            "iqr_intervention", "u", "z", "p", "effect_size_r", "stars"};
        csv::write_row(out, header);
        nlohmann::json j = nlohmann::json::array();
        std::vector<std::string> row(14);
        for (Period period : {Period::H1, Period::H2}) {
            stats::TestResult r = between_cohort_comparison(study, period, opts);
            const auto& s1 = r.group_summaries.at(0);
            const auto& s2 = r.group_summaries.at(1);
            row[0] = to_string(period);
            row[1] = std::to_string(s1.stats.n);
            row[2] = std::to_string(s1.inactive_days.value_or(0));
            row[3] = fmt(s1.stats.median);
            row[4] = fmt(s1.stats.iqr);
            row[5] = std::to_string(s2.stats.n);
            row[6] = std::to_string(s2.inactive_days.value_or(0));
            row[7] = fmt(s2.stats.median);
            row[8] = fmt(s2.stats.iqr);
            row[9] = fmt(r.statistic);
            row[10] = fmt(r.z_value.value_or(0.0));
            row[11] = fmt(r.p_two_tailed, "%.6f");
            row[12] = fmt(r.effect_size_r.value_or(0.0));
            row[13] = stats::significance_stars(r.p_two_tailed);
            csv::write_row(out, row);
            nlohmann::json e = to_json(r);
            e["period"] = to_string(period);
            j.push_back(std::move(e));
        }
        summary["table3"] = std::move(j);
        manifest.push_back("table3.csv");
    }

    // Table 4: within-cluster H1 vs H2, when clusters are assigned.
    if (have_clusters) {
        std::vector<std::pair<std::string, stats::TestResult>> results;
        for (const GroupSpec& g : make_groups(study, Grouping::Cluster)) {
            if (g.members.empty()) continue;
            std::vector<StudentRecord> members;
            members.reserve(g.members.size());
            for (const StudentRecord* p : g.members) members.push_back(*p);
            results.emplace_back(g.name,
                                 within_group_comparison(study, members, g.name, opts));
        }
        write_within_table("table4.csv", results);
        nlohmann::json j = nlohmann::json::array();
        for (const auto& [group, r] : results) {
            nlohmann::json e = to_json(r);
            e["group"] = group;
            j.push_back(std::move(e));
        }
        summary["table4"] = std::move(j);
    } else {
        summary["table4"] = "skipped: no cluster assignments";
    }

    // Table 5: feature correlations against reflective scores.
    {
        std::vector<StudentFeatures> features;
        std::map<std::string, double> scores;
        for (const Cohort* c : {&study.control, &study.intervention}) {
            for (const StudentRecord& s : c->students) {
                if (!s.reflective_score) continue;
                features.push_back(student_features(s.series, study.calendar, Period::Full));
                scores[s.student_id] = *s.reflective_score;
            }
        }
        if (features.size() >= 3) {
            std::vector<FeatureCorrelation> rows =
                feature_correlation_report(features, scores);
            std::ofstream out(out_dir / "table5.csv", std::ios::binary);
            static const std::vector<std::string> header = {"feature", "r", "p", "n",
                                                            "stars"};
            csv::write_row(out, header);
            nlohmann::json j = nlohmann::json::array();
            std::vector<std::string> row(5);
            for (const FeatureCorrelation& fc : rows) {
                row[0] = fc.feature;
                row[1] = fmt(fc.result.statistic);
                row[2] = fmt(fc.result.p_two_tailed, "%.6f");
                row[3] = std::to_string(static_cast<int>(features.size()));
                row[4] = stats::significance_stars(fc.result.p_two_tailed);
                csv::write_row(out, row);
                nlohmann::json e = to_json(fc.result);
                e["feature"] = fc.feature;
                j.push_back(std::move(e));
            }
            summary["table5"] = std::move(j);
            manifest.push_back("table5.csv");
        } else {
            summary["table5"] = "skipped: fewer than 3 students with reflective scores";
        }
    }

    // Table 6: independent t-tests on count features per half.
    {
        std::ofstream out(out_dir / "table6.csv", std::ios::binary);
        static const std::vector<std::string> header = {
            "period", "feature", "mean_control", "sd_control", "mean_intervention",
            "sd_intervention", "t", "df", "p", "stars"};
        csv::write_row(out, header);
        nlohmann::json j = nlohmann::json::array();
        std::vector<std::string> row(10);
        for (Period period : {Period::H1, Period::H2}) {
            for (const FeatureComparison& fc : feature_mean_comparison(study, period)) {
                const auto& s1 = fc.result.group_summaries.at(0);
                const auto& s2 = fc.result.group_summaries.at(1);
                row[0] = to_string(period);
                row[1] = fc.feature;
                row[2] = fmt(s1.stats.mean);
                row[3] = fmt(s1.stats.sd);
                row[4] = fmt(s2.stats.mean);
                row[5] = fmt(s2.stats.sd);
                row[6] = fmt(fc.result.statistic);
                row[7] = std::to_string(fc.result.df.value_or(0));
                row[8] = fmt(fc.result.p_two_tailed, "%.6f");
                row[9] = stats::significance_stars(fc.result.p_two_tailed);
                csv::write_row(out, row);
                nlohmann::json e = to_json(fc.result);
                e["feature"] = fc.feature;
                e["period"] = to_string(period);
                j.push_back(std::move(e));
            }
        }
        summary["table6"] = std::move(j);
        manifest.push_back("table6.csv");
    }

    FigureExport figures = export_figures(study, out_dir, opts);
    manifest.insert(manifest.end(), figures.files.begin(), figures.files.end());
    if (!figures.notice.empty()) summary["figures_notice"] = figures.notice;

    {
        std::ofstream out(out_dir / "summary.json", std::ios::binary);
        out << summary.dump(2) << '\n';
        manifest.push_back("summary.json");
    }
    std::sort(manifest.begin(), manifest.end());
    return manifest;
}

} // namespace revana::report
