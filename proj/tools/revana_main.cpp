// revana: revision-log engagement analytics pipeline.
//
// Subcommands: simulate, ingest, features, decompose, cluster, compare,
// feedback, report. Every command writes only inside its --out target and
// leaves inputs untouched; identical inputs and flags produce identical
// output bytes. Exit codes: 0 success, 1 data error, 2 usage error.

#include "revana/calendar.hpp"
#include "revana/csv.hpp"
#include "revana/errors.hpp"
#include "revana/feedback.hpp"
#include "revana/report.hpp"
#include "revana/revlog.hpp"
#include "revana/simcohort.hpp"
#include "revana/srl.hpp"
#include "revana/stats.hpp"
#include "revana/timeseries.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// JSON config support: {"report": {"exclude_inactive_days": true}, ...}.
// Command-line flags always win over config values.

class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        input >> j;
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

private:
    static void flatten(const json& j, std::vector<std::string> parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                flatten(value, nested, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }

    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }
};

// ---------------------------------------------------------------------------
// Study directory layout shared by the pipeline commands:
//   <dir>/calendar.json
//   <dir>/<cohort>/logs/<student_id>.csv
//   <dir>/<cohort>/srl.csv       (optional)
//   <dir>/<cohort>/scores.csv    (optional)
// with cohorts named "control" and "intervention".

revana::SemesterCalendar read_calendar(const fs::path& dir) {
    fs::path path = dir / "calendar.json";
    std::ifstream in(path);
    if (!in) revana::raise(revana::ErrorCode::Io, "missing " + path.string());
    json j;
    in >> j;
    std::string start = j.at("start_monday").get<std::string>();
    auto instant = revana::parse_iso8601(start + "T00:00:00", 0);
    std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(instant)};
    return revana::SemesterCalendar::make(
        ymd, j.value("weeks", 10), j.value("intervention_week", 6),
        j.value("utc_offset_minutes", 0));
}

void write_calendar(const fs::path& dir, const revana::SemesterCalendar& cal) {
    json j;
    j["start_monday"] = revana::format_date(cal.start_day());
    j["weeks"] = cal.weeks;
    j["intervention_week"] = cal.intervention_week;
    j["utc_offset_minutes"] = cal.utc_offset_minutes;
    std::ofstream out(dir / "calendar.json", std::ios::binary);
    out << j.dump(2) << '\n';
}

struct LoadOptions {
    revana::CountMode count_mode = revana::CountMode::Both;
    revana::LikertScale scale;
};

revana::report::Cohort load_cohort(const fs::path& dir, const std::string& name,
                                   const revana::SemesterCalendar& cal,
                                   const LoadOptions& opts, int& out_of_span) {
    revana::report::Cohort cohort;
    cohort.name = name;
    fs::path logs_dir = dir / name / "logs";
    if (!fs::exists(logs_dir)) return cohort;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(logs_dir)) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    for (const fs::path& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) revana::raise(revana::ErrorCode::Io, "cannot read " + file.string());
        revana::report::StudentRecord rec;
        rec.student_id = file.stem().string();
        rec.log = revana::parse_revision_log(in, rec.student_id,
                                             {cal.utc_offset_minutes});
        auto build = revana::build_daily_series(rec.log, cal, opts.count_mode);
        out_of_span += build.events_out_of_calendar;
        rec.series = std::move(build.series);
        cohort.students.push_back(std::move(rec));
    }

    fs::path srl_path = dir / name / "srl.csv";
    if (fs::exists(srl_path)) {
        std::ifstream in(srl_path, std::ios::binary);
        for (const revana::SrlResponse& r : revana::read_srl_csv(in, opts.scale)) {
            for (auto& s : cohort.students) {
                if (s.student_id == r.student_id) {
                    s.srl = revana::score_questionnaire(r, opts.scale);
                }
            }
        }
    }
    fs::path scores_path = dir / name / "scores.csv";
    if (fs::exists(scores_path)) {
        std::ifstream in(scores_path, std::ios::binary);
        revana::csv::Reader reader(in);
        std::vector<std::string> row;
        reader.next(row); // header
        while (reader.next(row)) {
            if (row.size() < 2) continue;
            for (auto& s : cohort.students) {
                if (s.student_id == row[0]) s.reflective_score = std::stod(row[1]);
            }
        }
    }
    return cohort;
}

revana::report::CohortStudy load_study(const fs::path& dir, const LoadOptions& opts) {
    revana::report::CohortStudy study;
    study.calendar = read_calendar(dir);
    int out_of_span = 0;
    study.control = load_cohort(dir, "control", study.calendar, opts, out_of_span);
    study.intervention = load_cohort(dir, "intervention", study.calendar, opts, out_of_span);
    if (out_of_span > 0) {
        std::cerr << "warning: " << out_of_span
                  << " event(s) outside the calendar span were ignored\n";
    }
    revana::report::check_study(study);
    return study;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::uint64_t seed = 7;
    std::string out;
    int control_count = 40;
    int intervention_count = 41;
    std::string control_pattern = "unimodal_sunday";
    std::string intervention_pattern = "bimodal_wed_sat";
    double control_multiplier = 1.0;
    double intervention_multiplier = 1.3;
    double inactive_prob = 0.35;
    double volume_log_mean = 6.0;
    double volume_log_sd = 0.8;
    double deletion_fraction = 0.15;
    double low_srl_fraction = 0.36;
    double sparse_fraction = 0.25;
    int response_delay_days = 0;
    std::string start_monday = "2021-09-27";
    int weeks = 10;
    int intervention_week = 6;
    int utc_offset_minutes = 0;
    double plant_correlation = 0.45;
};

revana::sim::WeeklyPattern parse_pattern(const std::string& name) {
    if (name == "unimodal_sunday") return revana::sim::WeeklyPattern::UnimodalSunday;
    if (name == "bimodal_wed_sat") return revana::sim::WeeklyPattern::BimodalWedSat;
    if (name == "uniform") return revana::sim::WeeklyPattern::Uniform;
    revana::raise(revana::ErrorCode::InvalidArgument, "unknown pattern '" + name + "'");
}

double deterministic_unit_normal(std::uint64_t seed, std::uint64_t index) {
    // Small inline generator for score noise; same mixing as the simulator.
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    double u1 = std::max(static_cast<double>(x >> 11) * 0x1.0p-53, 0x1.0p-53);
    std::uint64_t y = (x ^ 0xda3e39cb94b95bdbULL) * 0x2545f4914f6cdd1dULL;
    y = (y ^ (y >> 30)) * 0xbf58476d1ce4e5b9ULL;
    double u2 = static_cast<double>(y >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

void write_cohort_dir(const fs::path& dir, const revana::sim::GeneratedCohort& cohort,
                      const revana::SemesterCalendar& cal, double plant_correlation,
                      std::uint64_t score_seed) {
    fs::create_directories(dir / "logs");
    for (const auto& s : cohort.students) {
        std::ofstream out(dir / "logs" / (s.student_id + ".csv"), std::ios::binary);
        revana::write_revision_log(out, s.log);
    }
    {
        std::ofstream out(dir / "srl.csv", std::ios::binary);
        std::vector<std::string> header = {"student_id"};
        for (int i = 1; i <= revana::kSrlItemCount; ++i) header.push_back("q" + std::to_string(i));
        revana::csv::write_row(out, header);
        for (const revana::SrlResponse& r : revana::sim::questionnaire_responses(cohort)) {
            std::vector<std::string> row = {r.student_id};
            for (int v : r.item_scores) row.push_back(std::to_string(v));
            revana::csv::write_row(out, row);
        }
    }
    {
        // Reflective scores with a planted correlation on TotalActiveWeek,
        // so the correlation table has known ground truth.
        std::vector<double> taw;
        for (const auto& s : cohort.students) {
            revana::DailySeries series;
            series.owner = {revana::SeriesOwner::Kind::Student, s.student_id};
            series.start = cal.start_day();
            series.chars = s.realized_daily_chars;
            series.revisions.assign(s.realized_daily_chars.size(), 0);
            for (const auto& e : s.log.events) {
                auto day = cal.day_index(e.timestamp);
                if (day) series.revisions[*day] += 1;
            }
            taw.push_back(static_cast<double>(
                revana::student_features(series, cal, revana::Period::Full)
                    .total_active_week));
        }
        double mean = 0.0, sd = 0.0;
        for (double v : taw) mean += v;
        mean /= static_cast<double>(taw.size());
        for (double v : taw) sd += (v - mean) * (v - mean);
        sd = taw.size() > 1 ? std::sqrt(sd / static_cast<double>(taw.size() - 1)) : 0.0;

        std::ofstream out(dir / "scores.csv", std::ios::binary);
        std::vector<std::string> header = {"student_id", "score"};
        revana::csv::write_row(out, header);
        for (std::size_t i = 0; i < cohort.students.size(); ++i) {
            double z = sd > 0.0 ? (taw[i] - mean) / sd : 0.0;
            double noise = deterministic_unit_normal(score_seed, i);
            double latent = plant_correlation * z +
                            std::sqrt(std::max(0.0, 1.0 - plant_correlation * plant_correlation)) *
                                noise;
            double grade = std::clamp(62.0 + 9.0 * latent, 0.0, 100.0);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.1f", grade);
            std::vector<std::string> row = {cohort.students[i].student_id, buf};
            revana::csv::write_row(out, row);
        }
    }
}

int run_simulate(const SimulateArgs& args) {
    auto instant = revana::parse_iso8601(args.start_monday + "T00:00:00", 0);
    std::chrono::year_month_day start{std::chrono::floor<std::chrono::days>(instant)};
    auto cal = revana::SemesterCalendar::make(start, args.weeks, args.intervention_week,
                                              args.utc_offset_minutes);

    auto make_profiles = [&](const std::string& pattern, double multiplier, int count) {
        revana::sim::SimProfile base;
        base.weekly_pattern = parse_pattern(pattern);
        base.volume_log_mean = args.volume_log_mean;
        base.volume_log_sd = args.volume_log_sd;
        base.inactive_prob = args.inactive_prob;
        base.post_intervention_multiplier = multiplier;
        base.response_delay_days = args.response_delay_days;
        base.deletion_fraction = args.deletion_fraction;

        // Four groups per cohort: SRL level crossed with a sparse-writer
        // subgroup, so week-level activity genuinely varies across students.
        int low = static_cast<int>(std::lround(args.low_srl_fraction * count));
        int high = count - low;
        int high_sparse = static_cast<int>(std::lround(args.sparse_fraction * high));
        int low_sparse = static_cast<int>(std::lround(args.sparse_fraction * low));

        auto variant = [&](revana::SrlCluster level, bool sparse) {
            revana::sim::SimProfile p = base;
            p.srl_level = level;
            if (level == revana::SrlCluster::Low) {
                p.inactive_prob = std::min(0.95, p.inactive_prob + 0.1);
            }
            if (sparse) p.inactive_prob = std::min(0.95, p.inactive_prob + 0.45);
            return p;
        };
        std::vector<std::pair<int, revana::sim::SimProfile>> profiles;
        if (high - high_sparse > 0) {
            profiles.emplace_back(high - high_sparse,
                                  variant(revana::SrlCluster::High, false));
        }
        if (high_sparse > 0) {
            profiles.emplace_back(high_sparse, variant(revana::SrlCluster::High, true));
        }
        if (low - low_sparse > 0) {
            profiles.emplace_back(low - low_sparse,
                                  variant(revana::SrlCluster::Low, false));
        }
        if (low_sparse > 0) {
            profiles.emplace_back(low_sparse, variant(revana::SrlCluster::Low, true));
        }
        return profiles;
    };

    auto control = revana::sim::generate_cohort(
        make_profiles(args.control_pattern, args.control_multiplier, args.control_count),
        cal, args.seed, "control", "c");
    auto intervention = revana::sim::generate_cohort(
        make_profiles(args.intervention_pattern, args.intervention_multiplier,
                      args.intervention_count),
        cal, args.seed + 0x1000, "intervention", "i");

    fs::path out_dir(args.out);
    fs::create_directories(out_dir);
    write_calendar(out_dir, cal);
    write_cohort_dir(out_dir / "control", control, cal, args.plant_correlation,
                     args.seed ^ 0xabcdef12ULL);
    write_cohort_dir(out_dir / "intervention", intervention, cal, args.plant_correlation,
                     (args.seed + 0x1000) ^ 0xabcdef12ULL);

    json truth;
    truth["seed"] = args.seed;
    truth["planted_correlation"] = args.plant_correlation;
    truth["control"] = revana::sim::ground_truth_json(control);
    truth["intervention"] = revana::sim::ground_truth_json(intervention);
    std::ofstream out(out_dir / "ground_truth.json", std::ios::binary);
    out << truth.dump(2) << '\n';

    std::cout << "wrote " << (control.students.size() + intervention.students.size())
              << " student logs under " << out_dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// ingest

int run_ingest(const std::string& in, const std::string& student, const std::string& out,
               int tz_offset_minutes) {
    std::ifstream input(in, std::ios::binary);
    if (!input) revana::raise(revana::ErrorCode::Io, "cannot read " + in);
    revana::RevisionLog log =
        revana::parse_revision_log(input, student, {tz_offset_minutes});

    std::int64_t chars = 0;
    for (const auto& e : log.events) chars += revana::event_char_delta(e);
    json j;
    j["student_id"] = log.student_id;
    j["events"] = log.events.size();
    j["edited_chars"] = chars;
    if (!log.events.empty()) {
        j["first_timestamp"] = revana::format_iso8601_utc(log.events.front().timestamp);
        j["last_timestamp"] = revana::format_iso8601_utc(log.events.back().timestamp);
    }
    if (!out.empty()) {
        std::ofstream output(out, std::ios::binary);
        if (!output) revana::raise(revana::ErrorCode::Io, "cannot write " + out);
        revana::write_revision_log(output, log);
        j["normalized"] = out;
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// features

int run_features(const std::string& in, const std::string& out_dir_s,
                 const std::string& window_name, const std::string& count_mode) {
    LoadOptions opts;
    opts.count_mode = count_mode == "insert-only" ? revana::CountMode::InsertOnly
                                                  : revana::CountMode::Both;
    auto study = load_study(in, opts);

    std::vector<revana::Period> periods;
    if (window_name == "all") {
        periods = {revana::Period::H1, revana::Period::H2, revana::Period::Full};
    } else if (window_name == "h1") {
        periods = {revana::Period::H1};
    } else if (window_name == "h2") {
        periods = {revana::Period::H2};
    } else if (window_name == "full") {
        periods = {revana::Period::Full};
    } else {
        revana::raise(revana::ErrorCode::InvalidArgument,
                      "unknown window '" + window_name + "'");
    }

    fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);
    for (const auto* cohort : {&study.control, &study.intervention}) {
        if (cohort->students.empty()) continue;
        std::vector<revana::StudentFeatures> rows;
        for (const auto& s : cohort->students) {
            for (revana::Period p : periods) {
                rows.push_back(revana::student_features(s.series, study.calendar, p));
            }
        }
        std::ofstream out(out_dir / ("features_" + cohort->name + ".csv"),
                          std::ios::binary);
        revana::write_features_csv(out, rows);
    }
    std::cout << "features written to " << out_dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// decompose

int run_decompose(const std::string& in, const std::string& out, int period) {
    if (period != 7) {
        std::cerr << "note: the study design fixes the decomposition period at seven days; "
                     "honoring --period "
                  << period << "\n";
    }
    std::ifstream input(in, std::ios::binary);
    if (!input) revana::raise(revana::ErrorCode::Io, "cannot read " + in);
    revana::csv::Reader reader(input);
    std::vector<std::string> row;
    if (!reader.next(row) || row.size() < 2 || row[0] != "date") {
        revana::raise(revana::ErrorCode::MissingColumn,
                      "expected a series CSV with date,chars[,revisions] header");
    }
    std::vector<double> values;
    std::string first_date;
    while (reader.next(row)) {
        if (row.size() < 2) {
            revana::raise(revana::ErrorCode::MalformedRow,
                          "line " + std::to_string(reader.record_line()));
        }
        if (first_date.empty()) first_date = row[0];
        values.push_back(std::stod(row[1]));
    }
    auto start_instant = revana::parse_iso8601(first_date + "T00:00:00", 0);
    auto start = std::chrono::floor<std::chrono::days>(start_instant);

    auto result = revana::seasonal_decompose_additive(values, period);
    std::ofstream output(out, std::ios::binary);
    if (!output) revana::raise(revana::ErrorCode::Io, "cannot write " + out);
    revana::write_decomposition_csv(output, start, values, result);

    json j;
    j["period"] = period;
    j["seasonal_indices"] = result.seasonal_indices;
    std::cout << j.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// cluster

int run_cluster(const std::string& srl_path, const std::string& out,
                std::uint64_t seed, bool no_standardize, int restarts, int likert_min,
                int likert_max) {
    revana::LikertScale scale{likert_min, likert_max};
    std::ifstream in(srl_path, std::ios::binary);
    if (!in) revana::raise(revana::ErrorCode::Io, "cannot read " + srl_path);
    std::vector<revana::SrlResponse> responses = revana::read_srl_csv(in, scale);
    if (responses.empty()) {
        revana::raise(revana::ErrorCode::EmptyGroup, "no questionnaire rows");
    }

    std::vector<revana::SrlScores> scores;
    scores.reserve(responses.size());
    for (const auto& r : responses) scores.push_back(revana::score_questionnaire(r, scale));

    revana::KmeansOptions opts;
    opts.standardize = !no_standardize;
    opts.restarts = restarts;
    revana::KmeansResult result = revana::kmeans_2(scores, seed, opts);

    std::ofstream output(out, std::ios::binary);
    if (!output) revana::raise(revana::ErrorCode::Io, "cannot write " + out);
    revana::write_clusters_csv(output, result.assignments, scores);

    // Reliability of each dimension on this sample.
    auto dimension_matrix = [&](int first, int last) {
        std::vector<std::vector<double>> m;
        for (const auto& r : responses) {
            std::vector<double> row;
            for (int i = first; i <= last; ++i) row.push_back(r.item_scores[i - 1]);
            m.push_back(std::move(row));
        }
        return m;
    };
    json j;
    j["students"] = responses.size();
    int high = 0;
    for (const auto& a : result.assignments) high += a.cluster == revana::SrlCluster::High;
    j["high_srl"] = high;
    j["low_srl"] = static_cast<int>(responses.size()) - high;
    j["avg_within_centroid_distance"] = result.avg_within_centroid_distance;
    j["within_cluster_sse"] = result.within_cluster_sse;
    j["cronbach_alpha"] = {
        {"goal_setting", revana::cronbach_alpha(dimension_matrix(1, 4))},
        {"persistence", revana::cronbach_alpha(dimension_matrix(5, 14))},
        {"effort", revana::cronbach_alpha(dimension_matrix(15, 16))},
        {"self_efficacy", revana::cronbach_alpha(dimension_matrix(17, 25))},
    };
    std::cout << j.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// compare

int run_compare(const std::string& in, const std::string& out, bool exclude_inactive,
                bool pratt, std::uint64_t kmeans_seed) {
    auto study = load_study(in, {});
    revana::report::ReportOptions opts;
    opts.exclude_inactive_days = exclude_inactive;
    opts.wilcoxon_zeros =
        pratt ? revana::stats::ZeroPolicy::Pratt : revana::stats::ZeroPolicy::Drop;
    revana::report::assign_clusters(study, kmeans_seed);

    json j;
    j["within"] = json::array();
    for (const auto* cohort : {&study.control, &study.intervention}) {
        if (cohort->students.empty()) continue;
        auto r = revana::report::within_group_comparison(study, cohort->students,
                                                         cohort->name, opts);
        json e = revana::report::to_json(r);
        e["group"] = cohort->name;
        j["within"].push_back(std::move(e));
    }
    j["between"] = json::array();
    if (!study.control.students.empty() && !study.intervention.students.empty()) {
        for (revana::Period p : {revana::Period::H1, revana::Period::H2}) {
            auto r = revana::report::between_cohort_comparison(study, p, opts);
            json e = revana::report::to_json(r);
            e["period"] = revana::to_string(p);
            j["between"].push_back(std::move(e));
        }
    }
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream output(out, std::ios::binary);
        if (!output) revana::raise(revana::ErrorCode::Io, "cannot write " + out);
        output << j.dump(2) << '\n';
        std::cout << "comparisons written to " << out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// feedback

int run_feedback(const std::string& in, const std::string& out_dir_s,
                 const std::string& template_path, double dominant_share,
                 int late_start_week) {
    auto study = load_study(in, {});
    if (study.intervention.students.empty()) {
        revana::raise(revana::ErrorCode::EmptyGroup,
                      "feedback targets the intervention cohort, which is empty");
    }
    if (study.control.students.empty()) {
        revana::raise(revana::ErrorCode::EmptyGroup,
                      "the control cohort serves as the reference year and is empty");
    }

    std::string template_text = revana::default_feedback_template();
    if (!template_path.empty()) {
        std::ifstream tin(template_path, std::ios::binary);
        if (!tin) revana::raise(revana::ErrorCode::Io, "cannot read " + template_path);
        template_text.assign(std::istreambuf_iterator<char>(tin), {});
    }

    revana::DayWindow h1 = revana::window(study.calendar, revana::Period::H1);
    revana::DailySeries cohort_h1 = revana::slice(
        revana::report::group_average_series(study.intervention.students, "intervention"),
        h1);
    revana::DailySeries reference_h1 = revana::slice(
        revana::report::group_average_series(study.control.students, "control"), h1);

    revana::FeedbackOptions fopts;
    fopts.dominant_week_share = dominant_share;
    fopts.late_start_week = late_start_week;

    fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);
    for (const auto& s : study.intervention.students) {
        revana::FeedbackInput input;
        input.student_id = s.student_id;
        input.student_series_h1 = revana::slice(s.series, h1);
        input.cohort_series_h1 = cohort_h1;
        input.reference_cohort_series_h1 = reference_h1;
        input.features_h1 =
            revana::student_features(s.series, study.calendar, revana::Period::H1);
        input.pattern =
            revana::classify_pattern(input.features_h1, input.student_series_h1,
                                     cohort_h1, reference_h1, fopts);

        std::ofstream email(out_dir / (s.student_id + ".txt"), std::ios::binary);
        email << revana::render_feedback_email(input, template_text);
        std::ofstream chart(out_dir / (s.student_id + ".svg"), std::ios::binary);
        chart << revana::render_comparison_chart(input);
    }
    std::cout << "feedback for " << study.intervention.students.size()
              << " students written to " << out_dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
    std::string in;
    std::string out;
    bool exclude_inactive_days = false;
    bool pratt = false;
    bool whole_semester_decomposition = false;
    bool per_student_seasonality = false;
    bool session_frequency = false;
    bool exclude_week1 = false;
    bool no_standardize = false;
    std::uint64_t kmeans_seed = 1;
    std::string count_mode = "both";
};

int run_report(const ReportArgs& args) {
    LoadOptions load_opts;
    load_opts.count_mode = args.count_mode == "insert-only" ? revana::CountMode::InsertOnly
                                                            : revana::CountMode::Both;
    auto study = load_study(args.in, load_opts);

    revana::KmeansOptions kopts;
    kopts.standardize = !args.no_standardize;
    revana::report::assign_clusters(study, args.kmeans_seed, kopts);

    revana::report::ReportOptions opts;
    opts.exclude_inactive_days = args.exclude_inactive_days;
    opts.wilcoxon_zeros = args.pratt ? revana::stats::ZeroPolicy::Pratt
                                     : revana::stats::ZeroPolicy::Drop;
    opts.whole_semester_decomposition = args.whole_semester_decomposition;
    opts.per_student_seasonality = args.per_student_seasonality;
    opts.session_frequency = args.session_frequency;
    opts.exclude_week1 = args.exclude_week1;
    opts.kmeans_seed = args.kmeans_seed;

    auto manifest = revana::report::run_full_report(study, args.out, opts);
    std::cout << "report artifacts (" << manifest.size() << ") written to " << args.out
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Engagement analytics for document revision logs"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; command-line flags take precedence");

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic two-cohort study");
    sim->add_option("--seed", sim_args.seed, "Master seed");
    sim->add_option("--out", sim_args.out, "Output study directory")->required();
    sim->add_option("--control-count", sim_args.control_count);
    sim->add_option("--intervention-count", sim_args.intervention_count);
    sim->add_option("--control-pattern", sim_args.control_pattern,
                    "unimodal_sunday|bimodal_wed_sat|uniform");
    sim->add_option("--intervention-pattern", sim_args.intervention_pattern);
    sim->add_option("--control-multiplier", sim_args.control_multiplier,
                    "Post-intervention volume multiplier, control cohort");
    sim->add_option("--intervention-multiplier", sim_args.intervention_multiplier);
    sim->add_option("--inactive-prob", sim_args.inactive_prob);
    sim->add_option("--volume-log-mean", sim_args.volume_log_mean);
    sim->add_option("--volume-log-sd", sim_args.volume_log_sd);
    sim->add_option("--deletion-fraction", sim_args.deletion_fraction);
    sim->add_option("--low-srl-fraction", sim_args.low_srl_fraction);
    sim->add_option("--sparse-fraction", sim_args.sparse_fraction,
                    "Fraction of each cohort writing only in occasional weeks");
    sim->add_option("--response-delay-days", sim_args.response_delay_days);
    sim->add_option("--start-monday", sim_args.start_monday, "YYYY-MM-DD, a Monday");
    sim->add_option("--weeks", sim_args.weeks);
    sim->add_option("--intervention-week", sim_args.intervention_week);
    sim->add_option("--utc-offset-minutes", sim_args.utc_offset_minutes);
    sim->add_option("--plant-correlation", sim_args.plant_correlation,
                    "Planted score correlation on TotalActiveWeek");
    sim->callback([&]() { run_simulate(sim_args); });

    std::string ingest_in, ingest_student, ingest_out;
    int ingest_tz = 0;
    CLI::App* ingest = app.add_subcommand("ingest", "Validate and normalize one log CSV");
    ingest->add_option("--in", ingest_in, "Revision-log CSV")->required();
    ingest->add_option("--student", ingest_student, "Student id")->required();
    ingest->add_option("--out", ingest_out, "Normalized CSV path");
    ingest->add_option("--tz-offset-minutes", ingest_tz,
                       "Offset for timestamps without an explicit one");
    ingest->callback([&]() { run_ingest(ingest_in, ingest_student, ingest_out, ingest_tz); });

    std::string feat_in, feat_out, feat_window = "all", feat_count_mode = "both";
    CLI::App* feat = app.add_subcommand("features", "Export the seven engagement features");
    feat->add_option("--in", feat_in, "Study directory")->required();
    feat->add_option("--out", feat_out, "Output directory")->required();
    feat->add_option("--window", feat_window, "h1|h2|full|all");
    feat->add_option("--count-mode", feat_count_mode, "both|insert-only");
    feat->callback([&]() { run_features(feat_in, feat_out, feat_window, feat_count_mode); });

    std::string dec_in, dec_out;
    int dec_period = 7;
    CLI::App* dec = app.add_subcommand("decompose", "Additive seasonal decomposition");
    dec->add_option("--in", dec_in, "Series CSV (date,chars,...)")->required();
    dec->add_option("--out", dec_out, "Decomposition CSV")->required();
    dec->add_option("--period", dec_period, "Seasonal period in days (design value: 7)");
    dec->callback([&]() { run_decompose(dec_in, dec_out, dec_period); });

    std::string clu_srl, clu_out;
    std::uint64_t clu_seed = 1;
    bool clu_no_standardize = false;
    int clu_restarts = 10, clu_likert_min = 1, clu_likert_max = 5;
    CLI::App* clu = app.add_subcommand("cluster", "Score the questionnaire and cluster");
    clu->add_option("--srl", clu_srl, "Questionnaire CSV (student_id,q1..q25)")->required();
    clu->add_option("--out", clu_out, "Cluster assignment CSV")->required();
    clu->add_option("--seed", clu_seed);
    clu->add_flag("--no-standardize", clu_no_standardize,
                  "Cluster on raw dimension means instead of z-scores");
    clu->add_option("--restarts", clu_restarts);
    clu->add_option("--likert-min", clu_likert_min);
    clu->add_option("--likert-max", clu_likert_max);
    clu->callback([&]() {
        run_cluster(clu_srl, clu_out, clu_seed, clu_no_standardize, clu_restarts,
                    clu_likert_min, clu_likert_max);
    });

    std::string cmp_in, cmp_out;
    bool cmp_exclude = false, cmp_pratt = false;
    std::uint64_t cmp_seed = 1;
    CLI::App* cmp = app.add_subcommand("compare", "Within/between cohort comparisons");
    cmp->add_option("--in", cmp_in, "Study directory")->required();
    cmp->add_option("--out", cmp_out, "JSON output path (default stdout)");
    cmp->add_flag("--exclude-inactive-days", cmp_exclude,
                  "Summaries and Mann-Whitney samples skip zero-activity days");
    cmp->add_flag("--pratt", cmp_pratt, "Pratt handling of zero differences");
    cmp->add_option("--kmeans-seed", cmp_seed);
    cmp->callback([&]() { run_compare(cmp_in, cmp_out, cmp_exclude, cmp_pratt, cmp_seed); });

    std::string fb_in, fb_out, fb_template;
    double fb_share = 0.5;
    int fb_late_week = 3;
    CLI::App* fb = app.add_subcommand("feedback", "Render per-student feedback emails");
    fb->add_option("--in", fb_in, "Study directory")->required();
    fb->add_option("--out", fb_out, "Output directory")->required();
    fb->add_option("--template", fb_template, "Template file with {{slot}} markers");
    fb->add_option("--dominant-week-share", fb_share,
                   "Share of characters that makes a week dominant");
    fb->add_option("--late-start-week", fb_late_week,
                   "First-activity week counted as a late start");
    fb->callback([&]() { run_feedback(fb_in, fb_out, fb_template, fb_share, fb_late_week); });

    ReportArgs rep_args;
    CLI::App* rep = app.add_subcommand("report", "Full table and figure artifact set");
    rep->add_option("--in", rep_args.in, "Study directory")->required();
    rep->add_option("--out", rep_args.out, "Report directory")->required();
    rep->add_flag("--exclude-inactive-days", rep_args.exclude_inactive_days);
    rep->add_flag("--pratt", rep_args.pratt);
    rep->add_flag("--whole-semester-decomposition",
                  rep_args.whole_semester_decomposition);
    rep->add_flag("--per-student-seasonality", rep_args.per_student_seasonality);
    rep->add_flag("--session-frequency", rep_args.session_frequency,
                  "Table 1 from 30-minute sessions instead of active days");
    rep->add_flag("--exclude-week1", rep_args.exclude_week1,
                  "Drop the optional first week from Table 1");
    rep->add_flag("--no-standardize", rep_args.no_standardize);
    rep->add_option("--kmeans-seed", rep_args.kmeans_seed);
    rep->add_option("--count-mode", rep_args.count_mode, "both|insert-only");
    rep->callback([&]() { run_report(rep_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const revana::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
