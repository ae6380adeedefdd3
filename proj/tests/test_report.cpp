#include "revana/report.hpp"

#include "doctest.h"
#include "revana/errors.hpp"
#include "revana/simcohort.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace revana;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

SemesterCalendar test_calendar() {
    using namespace std::chrono;
    return SemesterCalendar::make(year{2021} / September / day{27}, 10, 6, 0);
}

report::StudentRecord student_with_weekly_day(const SemesterCalendar& cal,
                                              const std::string& id, int day_of_week,
                                              double chars) {
    report::StudentRecord rec;
    rec.student_id = id;
    rec.series.owner = {SeriesOwner::Kind::Student, id};
    rec.series.start = cal.start_day();
    rec.series.chars.assign(cal.day_count(), 0.0);
    rec.series.revisions.assign(cal.day_count(), 0);
    for (int w = 0; w < cal.weeks; ++w) {
        int d = w * 7 + day_of_week;
        rec.series.chars[d] = chars;
        rec.series.revisions[d] = 1;
    }
    return rec;
}

report::CohortStudy simulated_study(std::uint64_t seed, double multiplier = 1.3,
                                    double inactive_prob = 0.35,
                                    double intervention_inactive_prob = -1.0) {
    auto cal = test_calendar();
    sim::SimProfile control_profile;
    control_profile.weekly_pattern = sim::WeeklyPattern::UnimodalSunday;
    control_profile.inactive_prob = inactive_prob;
    sim::SimProfile intervention_profile = control_profile;
    intervention_profile.weekly_pattern = sim::WeeklyPattern::BimodalWedSat;
    intervention_profile.post_intervention_multiplier = multiplier;
    if (intervention_inactive_prob >= 0.0) {
        intervention_profile.inactive_prob = intervention_inactive_prob;
    }

    report::CohortStudy study;
    study.calendar = cal;
    auto fill = [&](report::Cohort& cohort, const sim::GeneratedCohort& gen) {
        cohort.name = gen.name;
        for (const auto& s : gen.students) {
            report::StudentRecord rec;
            rec.student_id = s.student_id;
            rec.log = s.log;
            rec.series = build_daily_series(s.log, cal).series;
            cohort.students.push_back(std::move(rec));
        }
    };
    fill(study.control,
         sim::generate_cohort({{40, control_profile}}, cal, seed, "control", "c"));
    fill(study.intervention, sim::generate_cohort({{40, intervention_profile}}, cal,
                                                  seed + 0x1000, "intervention", "i"));
    return study;
}

} // namespace

TEST_CASE("editing frequency table partitions student-weeks") {
    auto cal = test_calendar();
    report::CohortStudy study;
    study.calendar = cal;
    study.control.name = "control";
    study.intervention.name = "intervention";
    // One control student active exactly once per week, one intervention
    // student active twice per week, one fully inactive.
    study.control.students.push_back(student_with_weekly_day(cal, "c1", 2, 50));
    auto twice = student_with_weekly_day(cal, "i1", 2, 50);
    for (int w = 0; w < cal.weeks; ++w) {
        twice.series.chars[w * 7 + 5] = 10;
        twice.series.revisions[w * 7 + 5] = 1;
    }
    study.intervention.students.push_back(std::move(twice));
    report::StudentRecord idle;
    idle.student_id = "i2";
    idle.series.owner = {SeriesOwner::Kind::Student, "i2"};
    idle.series.start = cal.start_day();
    idle.series.chars.assign(cal.day_count(), 0.0);
    idle.series.revisions.assign(cal.day_count(), 0);
    study.intervention.students.push_back(std::move(idle));

    auto rows = report::editing_frequency_table(study, report::Grouping::Cohort);
    REQUIRE(rows.size() == 4); // 2 groups x 2 periods
    for (const auto& r : rows) {
        CHECK(r.no_edit_pct + r.once_pct + r.twice_or_more_pct == Approx(100.0).epsilon(1e-9));
    }
    // Control H1: 5 student-weeks, all "once".
    CHECK(rows[0].group == "control");
    CHECK(rows[0].once_pct == Approx(100.0));
    // Intervention H1: 10 student-weeks, 5 twice-or-more from i1, 5 no-edit from i2.
    CHECK(rows[2].group == "intervention");
    CHECK(rows[2].twice_or_more_pct == Approx(50.0));
    CHECK(rows[2].no_edit_pct == Approx(50.0));
}

TEST_CASE("deterministic generator mix is recovered exactly in table 1") {
    auto study = simulated_study(404);
    auto rows = report::editing_frequency_table(study, report::Grouping::Cohort);
    // Recompute one cell straight from the weekly categories.
    int twice = 0, total = 0;
    for (const auto& s : study.control.students) {
        for (const auto& c : weekly_edit_categories(s.series, study.calendar, Period::H1)) {
            total += 1;
            twice += c.category == EditFrequency::TwiceOrMore;
        }
    }
    CHECK(rows[0].student_weeks == total);
    CHECK(rows[0].twice_or_more_pct == Approx(100.0 * twice / total).epsilon(1e-12));
}

TEST_CASE("within-group comparison flags the simulated intervention effect") {
    auto study = simulated_study(7);
    auto control = report::within_group_comparison(study, study.control.students,
                                                   "control");
    auto intervention = report::within_group_comparison(study, study.intervention.students,
                                                        "intervention");
    CHECK(control.p_two_tailed > 0.05);
    CHECK(intervention.p_two_tailed < 0.05);
    CHECK(intervention.group_summaries.size() == 2);
    CHECK(intervention.group_summaries[0].stats.n == 35);
    CHECK(intervention.group_summaries[0].inactive_days.has_value());
}

TEST_CASE("within-group comparison reports no-change instead of failing") {
    auto cal = test_calendar();
    report::CohortStudy study;
    study.calendar = cal;
    study.control.name = "control";
    study.intervention.name = "intervention";
    study.control.students.push_back(student_with_weekly_day(cal, "c1", 2, 50));
    auto r = report::within_group_comparison(study, study.control.students, "control");
    CHECK(r.note == "no-change");
    CHECK(r.p_two_tailed == Approx(1.0));
}

TEST_CASE("between-cohort comparison basics") {
    auto study = simulated_study(11, 1.0);
    auto h1 = report::between_cohort_comparison(study, Period::H1);
    CHECK(h1.p_two_tailed > 0.05); // same volume scale before the intervention
    CHECK(h1.group_summaries[0].stats.n == 35);

    // Disjoint volume supports give complete separation.
    auto cal = test_calendar();
    report::CohortStudy tiny;
    tiny.calendar = cal;
    tiny.control.name = "control";
    tiny.intervention.name = "intervention";
    auto daily_student = [&](const std::string& id, double base) {
        report::StudentRecord rec;
        rec.student_id = id;
        rec.series.owner = {SeriesOwner::Kind::Student, id};
        rec.series.start = cal.start_day();
        rec.series.chars.assign(cal.day_count(), 0.0);
        rec.series.revisions.assign(cal.day_count(), 0);
        for (int d = 0; d < cal.day_count(); ++d) {
            rec.series.chars[d] = base + d % 5;
            rec.series.revisions[d] = 1;
        }
        return rec;
    };
    tiny.control.students.push_back(daily_student("c1", 5.0));
    tiny.intervention.students.push_back(daily_student("i1", 50000.0));
    auto sep = report::between_cohort_comparison(tiny, Period::H1);
    CHECK(sep.statistic == Approx(0.0));

    // Swapping cohort labels preserves magnitude and p.
    report::CohortStudy swapped = study;
    std::swap(swapped.control, swapped.intervention);
    auto orig = report::between_cohort_comparison(study, Period::H2);
    auto swap = report::between_cohort_comparison(swapped, Period::H2);
    CHECK(swap.statistic == Approx(orig.statistic));
    CHECK(swap.p_two_tailed == Approx(orig.p_two_tailed));
    CHECK(std::fabs(*swap.z_value) == Approx(std::fabs(*orig.z_value)));
}

TEST_CASE("feature correlation report") {
    // Sparse activity so TotalActiveWeek actually varies across students.
    auto study = simulated_study(31, 1.3, 0.8);
    std::vector<StudentFeatures> features;
    std::map<std::string, double> scores;
    for (const auto& s : study.control.students) {
        auto f = student_features(s.series, study.calendar, Period::Full);
        scores[s.student_id] = static_cast<double>(f.total_active_week);
        features.push_back(std::move(f));
    }
    auto rows = report::feature_correlation_report(features, scores);
    REQUIRE(rows.size() == 7);
    bool found = false;
    for (const auto& r : rows) {
        if (r.feature == "TotalActiveWeek") {
            found = true;
            CHECK(r.result.statistic == Approx(1.0));
        }
    }
    CHECK(found);

    scores.erase(scores.begin()->first);
    scores["ghost"] = 1.0;
    CHECK_THROWS_AS(report::feature_correlation_report(features, scores), Error);
}

TEST_CASE("planted correlation is recovered within the sampling band") {
    auto study = simulated_study(83, 1.3, 0.8);
    std::vector<StudentFeatures> features;
    std::map<std::string, double> scores;
    std::size_t index = 0;
    // Plant rho = 0.45 on TotalActiveWeek across all 80 students.
    std::vector<const report::StudentRecord*> all;
    for (const auto& s : study.control.students) all.push_back(&s);
    for (const auto& s : study.intervention.students) all.push_back(&s);
    std::mt19937_64 rng(5);
    auto noise = [&]() {
        double u = std::max(static_cast<double>(rng() >> 11) * 0x1.0p-53, 1e-16);
        double v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
    };
    std::vector<double> taw;
    for (const auto* s : all) {
        auto f = student_features(s->series, study.calendar, Period::Full);
        taw.push_back(static_cast<double>(f.total_active_week));
        features.push_back(std::move(f));
    }
    double mean = 0.0, sd = 0.0;
    for (double v : taw) mean += v;
    mean /= taw.size();
    for (double v : taw) sd += (v - mean) * (v - mean);
    sd = std::sqrt(sd / (taw.size() - 1));
    for (const auto* s : all) {
        double z = (taw[index] - mean) / sd;
        scores[s->student_id] = 0.45 * z + std::sqrt(1 - 0.45 * 0.45) * noise();
        ++index;
    }
    auto rows = report::feature_correlation_report(features, scores);
    for (const auto& r : rows) {
        if (r.feature == "TotalActiveWeek") {
            CHECK(r.result.statistic > 0.3);
            CHECK(r.result.statistic < 0.6);
        }
    }
}

TEST_CASE("feature mean comparison") {
    auto study = simulated_study(59, 1.0);
    // Identical cohorts: compare the control cohort against itself.
    report::CohortStudy same;
    same.calendar = study.calendar;
    same.control = study.control;
    same.intervention = study.control;
    same.intervention.name = "intervention";
    for (auto& s : same.intervention.students) s.student_id += "_copy";
    auto rows = report::feature_mean_comparison(same, Period::H1);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.result.statistic == Approx(0.0));
        CHECK(r.result.p_two_tailed == Approx(1.0));
    }

    // A planted activity-rate shift moves the count features.
    auto shifted = simulated_study(59, 1.0, 0.6, 0.3);
    auto h2 = report::feature_mean_comparison(shifted, Period::H2);
    bool significant = false;
    for (const auto& r : h2) significant |= r.result.p_two_tailed < 0.05;
    CHECK(significant);
}

TEST_CASE("export figures and the full report") {
    fs::path dir = fs::temp_directory_path() / "revana_report_test";
    fs::remove_all(dir);

    report::CohortStudy empty;
    empty.calendar = test_calendar();
    empty.control.name = "control";
    empty.intervention.name = "intervention";
    auto notice = report::export_figures(empty, dir / "empty");
    CHECK(notice.files.empty());
    CHECK(!notice.notice.empty());
    CHECK(!fs::exists(dir / "empty"));

    auto study = simulated_study(7);
    // Attach SRL responses so clusters and table 4 materialize.
    auto attach = [&](report::Cohort& cohort, const sim::GeneratedCohort& gen) {
        auto responses = sim::questionnaire_responses(gen);
        for (std::size_t i = 0; i < cohort.students.size(); ++i) {
            cohort.students[i].srl = score_questionnaire(responses[i]);
            cohort.students[i].reflective_score =
                50.0 + 0.5 * static_cast<double>(
                                 student_features(cohort.students[i].series, study.calendar,
                                                  Period::Full)
                                     .total_active_day);
        }
    };
    sim::SimProfile cp;
    cp.weekly_pattern = sim::WeeklyPattern::UnimodalSunday;
    sim::SimProfile ip = cp;
    ip.post_intervention_multiplier = 1.3;
    attach(study.control, sim::generate_cohort({{40, cp}}, study.calendar, 7, "control", "c"));
    attach(study.intervention,
           sim::generate_cohort({{40, ip}}, study.calendar, 7 + 0x1000, "intervention", "i"));
    report::assign_clusters(study, 1);

    auto manifest = report::run_full_report(study, dir / "full", {});
    for (const char* required :
         {"table1.csv", "table2.csv", "table3.csv", "table4.csv", "table5.csv",
          "table6.csv", "fig2_h1.svg", "fig2_h2.svg", "fig3_control.svg",
          "fig3_intervention.svg", "summary.json"}) {
        CAPTURE(required);
        CHECK(std::find(manifest.begin(), manifest.end(), required) != manifest.end());
        CHECK(fs::exists(dir / "full" / required));
    }

    // Determinism: a second run produces byte-identical artifacts.
    auto manifest2 = report::run_full_report(study, dir / "again", {});
    CHECK(manifest == manifest2);
    for (const char* file : {"table2.csv", "fig3_control.svg", "summary.json"}) {
        std::ifstream a(dir / "full" / file, std::ios::binary);
        std::ifstream b(dir / "again" / file, std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }

    // Recomputability: the table-3 control median equals a fresh summary of
    // the exported raw series within the H1 window.
    {
        std::ifstream series_csv(dir / "full" / "series_control.csv");
        REQUIRE(series_csv.good());
        std::string line;
        std::getline(series_csv, line); // header
        std::vector<double> chars;
        while (std::getline(series_csv, line)) {
            auto first = line.find(',');
            auto second = line.find(',', first + 1);
            chars.push_back(std::stod(line.substr(first + 1, second - first - 1)));
        }
        REQUIRE(chars.size() == 70);
        std::vector<double> h1(chars.begin(), chars.begin() + 35);
        auto expected = stats::summarize(h1).median;

        std::ifstream table3(dir / "full" / "table3.csv");
        std::getline(table3, line); // header
        std::getline(table3, line); // h1 row
        std::stringstream ss(line);
        std::string cell;
        for (int i = 0; i <= 3; ++i) std::getline(ss, cell, ',');
        CHECK(std::stod(cell) == Approx(expected).epsilon(1e-4));
    }

    fs::remove_all(dir);
}

TEST_CASE("study validation rejects duplicate ids") {
    auto cal = test_calendar();
    report::CohortStudy study;
    study.calendar = cal;
    study.control.name = "control";
    study.intervention.name = "intervention";
    study.control.students.push_back(student_with_weekly_day(cal, "dup", 1, 5));
    study.intervention.students.push_back(student_with_weekly_day(cal, "dup", 2, 5));
    CHECK_THROWS_AS(report::check_study(study), Error);
}
