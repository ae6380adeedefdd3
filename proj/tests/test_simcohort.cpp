#include "revana/simcohort.hpp"

#include "doctest.h"
#include "revana/calendar.hpp"
#include "revana/stats.hpp"
#include "revana/timeseries.hpp"

#include <numeric>
#include <sstream>

using namespace revana;
using doctest::Approx;

namespace {

SemesterCalendar test_calendar() {
    using namespace std::chrono;
    return SemesterCalendar::make(year{2021} / September / day{27}, 10, 6, 0);
}

sim::SimProfile base_profile() {
    sim::SimProfile p;
    p.weekly_pattern = sim::WeeklyPattern::Uniform;
    p.volume_log_mean = 6.0;
    p.volume_log_sd = 0.8;
    p.inactive_prob = 0.35;
    return p;
}

DailySeries cohort_average(const sim::GeneratedCohort& cohort,
                           const SemesterCalendar& cal) {
    std::vector<DailySeries> series;
    for (const auto& s : cohort.students) {
        series.push_back(build_daily_series(s.log, cal).series);
    }
    return cohort_daily_average(series, cohort.name);
}

} // namespace

TEST_CASE("generation is deterministic for a seed") {
    auto cal = test_calendar();
    auto a = sim::generate_cohort({{5, base_profile()}}, cal, 99, "control", "c");
    auto b = sim::generate_cohort({{5, base_profile()}}, cal, 99, "control", "c");
    REQUIRE(a.students.size() == b.students.size());
    for (std::size_t i = 0; i < a.students.size(); ++i) {
        std::ostringstream sa, sb;
        write_revision_log(sa, a.students[i].log);
        write_revision_log(sb, b.students[i].log);
        CHECK(sa.str() == sb.str());
    }
    auto c = sim::generate_cohort({{5, base_profile()}}, cal, 100, "control", "c");
    std::ostringstream sa, sc;
    write_revision_log(sa, a.students[0].log);
    write_revision_log(sc, c.students[0].log);
    CHECK(sa.str() != sc.str());
}

TEST_CASE("generated logs satisfy all revision-log invariants") {
    auto cal = test_calendar();
    sim::SimProfile p = base_profile();
    p.deletion_fraction = 0.3;
    auto cohort = sim::generate_cohort({{8, p}}, cal, 7, "control", "c");
    for (const auto& s : cohort.students) {
        CHECK_NOTHROW(validate_log(s.log));
        // Round-trip via the CSV form.
        std::ostringstream out;
        write_revision_log(out, s.log);
        std::istringstream in(out.str());
        RevisionLog parsed = parse_revision_log(in, s.student_id);
        CHECK(parsed.events.size() == s.log.events.size());

        // Ground-truth realized chars match the series built from the log.
        auto built = build_daily_series(s.log, cal);
        CHECK(built.events_out_of_calendar == 0);
        for (int d = 0; d < cal.day_count(); ++d) {
            CHECK(built.series.chars[d] ==
                  Approx(s.realized_daily_chars[static_cast<std::size_t>(d)]));
        }
    }
}

TEST_CASE("unimodal sunday profile yields a sunday seasonality peak") {
    auto cal = test_calendar();
    sim::SimProfile p = base_profile();
    p.weekly_pattern = sim::WeeklyPattern::UnimodalSunday;
    p.inactive_prob = 0.2;
    auto cohort = sim::generate_cohort({{40, p}}, cal, 21, "control", "c");
    auto avg = cohort_average(cohort, cal);
    auto h1 = slice(avg, window(cal, Period::H1));
    auto d = seasonal_decompose_additive(h1.chars, 7);
    int argmax = 0;
    for (int i = 1; i < 7; ++i) {
        if (d.seasonal_indices[i] > d.seasonal_indices[argmax]) argmax = i;
    }
    CHECK(argmax == 6); // Sunday
}

TEST_CASE("bimodal profile yields wednesday and saturday local maxima") {
    auto cal = test_calendar();
    sim::SimProfile p = base_profile();
    p.weekly_pattern = sim::WeeklyPattern::BimodalWedSat;
    p.inactive_prob = 0.2;
    auto cohort = sim::generate_cohort({{40, p}}, cal, 22, "intervention", "i");
    auto avg = cohort_average(cohort, cal);
    auto full = seasonal_decompose_additive(avg.chars, 7);
    const auto& s = full.seasonal_indices;
    // Wednesday (2) above its neighbours, Saturday (5) above its own.
    CHECK(s[2] > s[1]);
    CHECK(s[2] > s[3]);
    CHECK(s[5] > s[4]);
    CHECK(s[5] > s[6]);
}

TEST_CASE("expected weekly mass follows the pattern weights") {
    auto cal = test_calendar();
    sim::SimProfile p = base_profile();
    p.weekly_pattern = sim::WeeklyPattern::UnimodalSunday;
    p.inactive_prob = 0.0;
    p.volume_log_sd = 0.4;
    auto cohort = sim::generate_cohort({{200, p}}, cal, 30, "control", "c");
    std::array<double, 7> mass{};
    for (const auto& s : cohort.students) {
        for (std::size_t d = 0; d < s.realized_daily_chars.size(); ++d) {
            mass[d % 7] += s.realized_daily_chars[d];
        }
    }
    double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    auto weights = sim::pattern_weights(sim::WeeklyPattern::UnimodalSunday);
    for (int i = 0; i < 7; ++i) {
        double expected = weights[static_cast<std::size_t>(i)] / 7.0;
        CHECK(mass[static_cast<std::size_t>(i)] / total == Approx(expected).epsilon(0.06));
    }
}

TEST_CASE("post-intervention multiplier shifts only the second half") {
    auto cal = test_calendar();
    sim::SimProfile p = base_profile();
    p.post_intervention_multiplier = 2.0;
    p.inactive_prob = 0.0;
    auto cohort = sim::generate_cohort({{60, p}}, cal, 13, "intervention", "i");
    double h1 = 0.0, h2 = 0.0;
    for (const auto& s : cohort.students) {
        for (int d = 0; d < 35; ++d) h1 += s.realized_daily_chars[d];
        for (int d = 35; d < 70; ++d) h2 += s.realized_daily_chars[d];
    }
    CHECK(h2 / h1 == Approx(2.0).epsilon(0.1));
}

TEST_CASE("questionnaire responses track the srl level") {
    auto cal = test_calendar();
    sim::SimProfile high = base_profile();
    sim::SimProfile low = base_profile();
    low.srl_level = SrlCluster::Low;
    auto cohort = sim::generate_cohort({{10, high}, {10, low}}, cal, 55, "control", "c");
    auto responses = sim::questionnaire_responses(cohort);
    REQUIRE(responses.size() == 20);
    double high_mean = 0.0, low_mean = 0.0;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        double m = 0.0;
        for (int v : responses[i].item_scores) m += v;
        m /= kSrlItemCount;
        if (cohort.students[i].profile.srl_level == SrlCluster::High) high_mean += m;
        else low_mean += m;
    }
    CHECK(high_mean / 10.0 > low_mean / 10.0 + 0.5);
}

TEST_CASE("ground truth json carries profiles and realized volumes") {
    auto cal = test_calendar();
    auto cohort = sim::generate_cohort({{3, base_profile()}}, cal, 77, "control", "c");
    auto j = sim::ground_truth_json(cohort);
    CHECK(j["cohort"] == "control");
    CHECK(j["seed"] == 77);
    REQUIRE(j["students"].size() == 3);
    CHECK(j["students"][0]["profile"]["weekly_pattern"] == "uniform");
    CHECK(j["students"][0]["realized_daily_chars"].size() == 70);
}
