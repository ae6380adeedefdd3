#include "revana/calendar.hpp"

#include "doctest.h"
#include "revana/errors.hpp"

#include <numeric>
#include <sstream>

using namespace revana;
using doctest::Approx;

namespace {

SemesterCalendar test_calendar(int tz = 0) {
    using namespace std::chrono;
    return SemesterCalendar::make(year{2021} / September / day{27}, 10, 6, tz);
}

RevisionEvent insertion_at(const std::string& iso, std::int64_t chars, std::int64_t rev) {
    RevisionEvent e;
    e.kind = EditKind::Insertion;
    e.payload = std::string(static_cast<std::size_t>(chars), 'x');
    e.start_index = 0;
    e.end_index = chars;
    e.revision_number = rev;
    e.user_id = "u";
    e.timestamp = parse_iso8601(iso);
    return e;
}

DailySeries series_of(std::vector<double> chars, std::vector<std::int64_t> revs,
                      const SemesterCalendar& cal, const std::string& id = "s") {
    DailySeries s;
    s.owner = {SeriesOwner::Kind::Student, id};
    s.start = cal.start_day();
    s.chars = std::move(chars);
    s.revisions = std::move(revs);
    return s;
}

} // namespace

TEST_CASE("calendar validation") {
    using namespace std::chrono;
    CHECK_THROWS_AS(SemesterCalendar::make(year{2021} / September / day{28}), Error);
    CHECK_THROWS_AS(SemesterCalendar::make(year{2021} / September / day{27}, 10, 1), Error);
    CHECK_THROWS_AS(SemesterCalendar::make(year{2021} / September / day{27}, 10, 11), Error);
    auto cal = test_calendar();
    CHECK(cal.day_count() == 70);
    CHECK(window(cal, Period::H1).day_count == 35);
    CHECK(window(cal, Period::H2).first_day == 35);
    CHECK(window(cal, Period::H2).day_count == 35);
    CHECK(window(cal, Period::Full).day_count == 70);
}

TEST_CASE("day index respects the calendar timezone") {
    auto cal = test_calendar();
    CHECK(*cal.day_index(parse_iso8601("2021-09-27T00:00:00Z")) == 0);
    CHECK(*cal.day_index(parse_iso8601("2021-09-27T23:59:59Z")) == 0);
    CHECK(*cal.day_index(parse_iso8601("2021-12-05T23:59:59Z")) == 69);
    CHECK(!cal.day_index(parse_iso8601("2021-09-26T23:59:59Z")).has_value());
    CHECK(!cal.day_index(parse_iso8601("2021-12-06T00:00:00Z")).has_value());

    // +60 offset: 23:30 UTC is already the next local day.
    auto shifted = test_calendar(60);
    CHECK(*shifted.day_index(parse_iso8601("2021-09-27T23:30:00Z")) == 1);
    CHECK(shifted.week_of_day(9) == 2);
    CHECK(shifted.weekday_of_day(9) == 2); // Wednesday
}

TEST_CASE("build daily series") {
    auto cal = test_calendar();
    RevisionLog log;
    log.student_id = log.document_id = "s1";

    SUBCASE("single event lands on week 2 Wednesday") {
        log.events.push_back(insertion_at("2021-10-06T10:00:00Z", 100, 1));
        auto built = build_daily_series(log, cal);
        CHECK(built.events_out_of_calendar == 0);
        CHECK(built.series.days() == 70);
        CHECK(built.series.chars[9] == Approx(100.0));
        double total = std::accumulate(built.series.chars.begin(),
                                       built.series.chars.end(), 0.0);
        CHECK(total == Approx(100.0));
        CHECK(built.series.revisions[9] == 1);
    }

    SUBCASE("empty log gives an explicit all-zero series") {
        auto built = build_daily_series(log, cal);
        CHECK(built.series.days() == 70);
        for (double c : built.series.chars) CHECK(c == 0.0);
    }

    SUBCASE("same-day events add up") {
        log.events.push_back(insertion_at("2021-10-06T10:00:00Z", 30, 1));
        log.events.push_back(insertion_at("2021-10-06T19:00:00Z", 70, 2));
        auto built = build_daily_series(log, cal);
        CHECK(built.series.chars[9] == Approx(100.0));
    }

    SUBCASE("out-of-span events are reported, not dropped silently") {
        log.events.push_back(insertion_at("2021-09-01T10:00:00Z", 10, 1));
        log.events.push_back(insertion_at("2021-10-06T10:00:00Z", 20, 2));
        auto built = build_daily_series(log, cal);
        CHECK(built.events_out_of_calendar == 1);
        CHECK(built.series.chars[9] == Approx(20.0));
    }

    SUBCASE("chars conservation across the series") {
        for (int i = 0; i < 25; ++i) {
            log.events.push_back(insertion_at("2021-10-06T10:00:00Z", 3 + i, i + 1));
        }
        RevisionEvent del;
        del.kind = EditKind::Deletion;
        del.start_index = 5;
        del.end_index = 25;
        del.revision_number = 100;
        del.user_id = "u";
        del.timestamp = parse_iso8601("2021-10-07T10:00:00Z");
        log.events.push_back(del);

        std::int64_t delta_sum = 0;
        for (const auto& e : log.events) delta_sum += event_char_delta(e);
        auto built = build_daily_series(log, cal);
        double series_sum = std::accumulate(built.series.chars.begin(),
                                            built.series.chars.end(), 0.0);
        CHECK(series_sum == Approx(static_cast<double>(delta_sum)));

        // Insert-only mode removes the deletion span from chars only.
        auto insert_only = build_daily_series(log, cal, CountMode::InsertOnly);
        double insert_sum = std::accumulate(insert_only.series.chars.begin(),
                                            insert_only.series.chars.end(), 0.0);
        CHECK(insert_sum == Approx(static_cast<double>(delta_sum - 20)));
        CHECK(insert_only.series.revisions[10] == 1);
    }
}

TEST_CASE("cohort daily average") {
    auto cal = test_calendar();
    std::vector<double> zeros(70, 0.0);
    std::vector<std::int64_t> zrev(70, 0);

    auto a = series_of(zeros, zrev, cal, "a");
    a.chars[3] = 100.0;
    auto b = series_of(zeros, zrev, cal, "b");
    b.chars[3] = 200.0;

    std::vector<DailySeries> two = {a, b};
    auto avg = cohort_daily_average(two, "cohort");
    CHECK(avg.chars[3] == Approx(150.0));
    CHECK(avg.owner.kind == SeriesOwner::Kind::CohortAverage);

    std::vector<DailySeries> one = {a};
    auto same = cohort_daily_average(one, "solo");
    CHECK(same.chars == a.chars);

    // A fully inactive student stays in the denominator.
    auto c = series_of(zeros, zrev, cal, "c");
    auto d = series_of(zeros, zrev, cal, "d");
    d.chars[5] = 60.0;
    std::vector<DailySeries> three = {c, d, series_of(zeros, zrev, cal, "e")};
    auto with_zero = cohort_daily_average(three, "cohort");
    CHECK(with_zero.chars[5] == Approx(20.0));

    CHECK_THROWS_AS(cohort_daily_average({}, "empty"), Error);

    // Permutation invariance and degree-1 homogeneity.
    std::vector<DailySeries> perm = {b, a};
    auto avg2 = cohort_daily_average(perm, "cohort");
    CHECK(avg2.chars == avg.chars);
    auto a2 = a;
    auto b2 = b;
    for (double& v : a2.chars) v *= 3.0;
    for (double& v : b2.chars) v *= 3.0;
    std::vector<DailySeries> scaled = {a2, b2};
    auto avg3 = cohort_daily_average(scaled, "cohort");
    for (int i = 0; i < 70; ++i) CHECK(avg3.chars[i] == Approx(3.0 * avg.chars[i]));
}

TEST_CASE("student features") {
    auto cal = test_calendar();
    std::vector<double> chars(70, 0.0);
    std::vector<std::int64_t> revs(70, 0);

    SUBCASE("five revisions, 100 chars, 3 days in 2 weeks") {
        chars[0] = 40;
        revs[0] = 2;
        chars[2] = 30;
        revs[2] = 1;
        chars[9] = 30;
        revs[9] = 2;
        auto f = student_features(series_of(chars, revs, cal), cal, Period::Full);
        CHECK(f.total_rev == 5);
        CHECK(f.total_active_day == 3);
        CHECK(f.total_active_week == 2);
        CHECK(f.avg_str_count_per_day == Approx(100.0 / 70.0));
        CHECK(f.avg_rev_per_day == Approx(5.0 / 70.0));
        CHECK(f.avg_str_count_per_week == Approx(100.0 / 10.0));
        CHECK(f.avg_str_count_per_week == Approx(7.0 * f.avg_str_count_per_day));
        CHECK(f.total_active_week <= f.total_active_day);
    }

    SUBCASE("empty series is all zeros") {
        auto f = student_features(series_of(chars, revs, cal), cal, Period::H1);
        CHECK(f.total_rev == 0);
        CHECK(f.total_active_day == 0);
        CHECK(f.avg_str_count_per_day == Approx(0.0));
    }

    SUBCASE("uniform 10 chars per day in H1") {
        for (int d = 0; d < 35; ++d) {
            chars[d] = 10;
            revs[d] = 1;
        }
        auto f = student_features(series_of(chars, revs, cal), cal, Period::H1);
        CHECK(f.total_active_day == 35);
        CHECK(f.avg_str_count_per_day == Approx(10.0));
        CHECK(f.total_active_week == 5);
    }
}

TEST_CASE("weekly edit categories") {
    auto cal = test_calendar();
    std::vector<double> chars(70, 0.0);
    std::vector<std::int64_t> revs(70, 0);
    // Week 1: Wednesday and Saturday. Week 2: one Sunday burst. Week 3: none.
    chars[2] = 10;
    revs[2] = 1;
    chars[5] = 5;
    revs[5] = 1;
    chars[13] = 5000;
    revs[13] = 40;
    auto cats = weekly_edit_categories(series_of(chars, revs, cal), cal, Period::H1);
    REQUIRE(cats.size() == 5);
    CHECK(cats[0].category == EditFrequency::TwiceOrMore);
    CHECK(cats[1].category == EditFrequency::Once);
    CHECK(cats[2].category == EditFrequency::NoEdit);
    CHECK(cats[0].week == 1);
}

TEST_CASE("weekly session categories split on idle gaps") {
    auto cal = test_calendar();
    RevisionLog log;
    log.student_id = "s";
    // Three events within half an hour: one session.
    log.events.push_back(insertion_at("2021-09-27T10:00:00Z", 5, 1));
    log.events.push_back(insertion_at("2021-09-27T10:10:00Z", 5, 2));
    log.events.push_back(insertion_at("2021-09-27T10:20:00Z", 5, 3));
    // Week 2: two sessions separated by two hours.
    log.events.push_back(insertion_at("2021-10-05T09:00:00Z", 5, 4));
    log.events.push_back(insertion_at("2021-10-05T11:00:00Z", 5, 5));
    auto cats = weekly_session_categories(log, cal, Period::H1);
    CHECK(cats[0].category == EditFrequency::Once);
    CHECK(cats[1].category == EditFrequency::TwiceOrMore);
}

TEST_CASE("features csv has the seven named columns") {
    auto cal = test_calendar();
    std::vector<double> chars(70, 1.0);
    std::vector<std::int64_t> revs(70, 1);
    auto f = student_features(series_of(chars, revs, cal), cal, Period::Full);
    std::ostringstream out;
    std::vector<StudentFeatures> rows = {f};
    write_features_csv(out, rows);
    std::string text = out.str();
    CHECK(text.find("TotalRev,AvgStrCountPerDay,AvgRevPerDay,TotalActiveDay,"
                    "AvgStrCountPerWeek,AvgRevPerWeek,TotalActiveWeek") !=
          std::string::npos);
}
