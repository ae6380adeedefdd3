#include "revana/calendar.hpp"

#include "revana/csv.hpp"
#include "revana/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace revana {

const char* to_string(Period p) {
    switch (p) {
        case Period::H1: return "h1";
        case Period::H2: return "h2";
        case Period::Full: return "full";
    }
    return "?";
}

const char* to_string(EditFrequency f) {
    switch (f) {
        case EditFrequency::NoEdit: return "no_edit";
        case EditFrequency::Once: return "once";
        case EditFrequency::TwiceOrMore: return "twice_or_more";
    }
    return "?";
}

SemesterCalendar SemesterCalendar::make(std::chrono::year_month_day start, int weeks,
                                        int intervention_week, int utc_offset_minutes) {
    using namespace std::chrono;
    if (!start.ok()) raise(ErrorCode::InvalidCalendar, "invalid start date");
    if (weekday{sys_days(start)} != Monday) {
        raise(ErrorCode::InvalidCalendar,
              "semester must start on a Monday, got " + format_date(sys_days(start)));
    }
    if (weeks < 2) raise(ErrorCode::InvalidCalendar, "need at least 2 weeks");
    if (intervention_week < 2 || intervention_week > weeks) {
        raise(ErrorCode::InvalidCalendar, "intervention week outside [2, weeks]");
    }
    SemesterCalendar cal;
    cal.start_monday = start;
    cal.weeks = weeks;
    cal.intervention_week = intervention_week;
    cal.utc_offset_minutes = utc_offset_minutes;
    return cal;
}

std::optional<int> SemesterCalendar::day_index(std::chrono::sys_seconds t) const {
    using namespace std::chrono;
    sys_seconds local = t + minutes(utc_offset_minutes);
    auto day = floor<std::chrono::days>(local);
    auto diff = (day - start_day()).count();
    if (diff < 0 || diff >= day_count()) return std::nullopt;
    return static_cast<int>(diff);
}

DayWindow window(const SemesterCalendar& cal, Period p) {
    int h1_weeks = cal.intervention_week - 1;
    switch (p) {
        case Period::H1: return {0, h1_weeks * 7, Period::H1};
        case Period::H2: return {h1_weeks * 7, (cal.weeks - h1_weeks) * 7, Period::H2};
        case Period::Full: return {0, cal.day_count(), Period::Full};
    }
    return {0, cal.day_count(), Period::Full};
}

DailySeriesBuild build_daily_series(const RevisionLog& log, const SemesterCalendar& cal,
                                    CountMode mode) {
    DailySeriesBuild out;
    out.series.owner = {SeriesOwner::Kind::Student, log.student_id};
    out.series.start = cal.start_day();
    out.series.chars.assign(cal.day_count(), 0.0);
    out.series.revisions.assign(cal.day_count(), 0);

    for (const RevisionEvent& e : log.events) {
        auto day = cal.day_index(e.timestamp);
        if (!day) {
            ++out.events_out_of_calendar;
            continue;
        }
        if (!(mode == CountMode::InsertOnly && e.kind == EditKind::Deletion)) {
            out.series.chars[*day] += static_cast<double>(event_char_delta(e));
        }
        out.series.revisions[*day] += 1;
    }
    return out;
}

DailySeries cohort_daily_average(std::span<const DailySeries> members,
                                 std::string cohort_label) {
    if (members.empty()) raise(ErrorCode::EmptyCohort, "no series to average");
    const int days = members[0].days();
    for (const DailySeries& s : members) {
        if (s.days() != days || s.start != members[0].start) {
            raise(ErrorCode::InvalidArgument, "cohort series do not share a calendar");
        }
    }
    DailySeries avg;
    avg.owner = {SeriesOwner::Kind::CohortAverage, std::move(cohort_label)};
    avg.start = members[0].start;
    avg.chars.assign(days, 0.0);
    avg.revisions.assign(days, 0);
    const double n = static_cast<double>(members.size());
    for (const DailySeries& s : members) {
        for (int d = 0; d < days; ++d) {
            avg.chars[d] += s.chars[d];
            avg.revisions[d] += s.revisions[d];
        }
    }
    for (int d = 0; d < days; ++d) avg.chars[d] /= n;
    return avg;
}

DailySeries slice(const DailySeries& s, DayWindow w) {
    if (w.first_day < 0 || w.first_day + w.day_count > s.days()) {
        raise(ErrorCode::InvalidArgument, "window outside series");
    }
    DailySeries out;
    out.owner = s.owner;
    out.start = s.start + std::chrono::days(w.first_day);
    out.chars.assign(s.chars.begin() + w.first_day,
                     s.chars.begin() + w.first_day + w.day_count);
    out.revisions.assign(s.revisions.begin() + w.first_day,
                         s.revisions.begin() + w.first_day + w.day_count);
    return out;
}

StudentFeatures student_features(const DailySeries& full, const SemesterCalendar& cal,
                                 Period period) {
    DayWindow w = window(cal, period);
    DailySeries s = slice(full, w);

    StudentFeatures f;
    f.student_id = full.owner.id;
    f.window = period;

    double total_chars = 0.0;
    std::vector<bool> week_active(static_cast<std::size_t>(w.week_count()), false);
    for (int d = 0; d < s.days(); ++d) {
        total_chars += s.chars[d];
        f.total_rev += s.revisions[d];
        if (s.chars[d] + static_cast<double>(s.revisions[d]) > 0.0) {
            ++f.total_active_day;
            week_active[static_cast<std::size_t>(d / 7)] = true;
        }
    }
    f.total_active_week = static_cast<int>(
        std::count(week_active.begin(), week_active.end(), true));

    const double days = static_cast<double>(w.day_count);
    const double weeks = static_cast<double>(w.week_count());
    f.avg_str_count_per_day = total_chars / days;
    f.avg_rev_per_day = static_cast<double>(f.total_rev) / days;
    f.avg_str_count_per_week = total_chars / weeks;
    f.avg_rev_per_week = static_cast<double>(f.total_rev) / weeks;
    return f;
}

namespace {

EditFrequency categorize(int frequency) {
    if (frequency == 0) return EditFrequency::NoEdit;
    if (frequency == 1) return EditFrequency::Once;
    return EditFrequency::TwiceOrMore;
}

} // namespace

std::vector<WeeklyEditCategory> weekly_edit_categories(const DailySeries& full,
                                                       const SemesterCalendar& cal,
                                                       Period period) {
    DayWindow w = window(cal, period);
    DailySeries s = slice(full, w);
    std::vector<WeeklyEditCategory> out;
    out.reserve(static_cast<std::size_t>(w.week_count()));
    for (int week = 0; week < w.week_count(); ++week) {
        int active_days = 0;
        for (int d = week * 7; d < (week + 1) * 7; ++d) {
            if (s.chars[d] + static_cast<double>(s.revisions[d]) > 0.0) ++active_days;
        }
        out.push_back({cal.week_of_day(w.first_day + week * 7), categorize(active_days)});
    }
    return out;
}

std::vector<WeeklyEditCategory> weekly_session_categories(const RevisionLog& log,
                                                          const SemesterCalendar& cal,
                                                          Period period,
                                                          std::chrono::seconds idle_gap) {
    DayWindow w = window(cal, period);
    std::vector<int> sessions_per_week(static_cast<std::size_t>(w.week_count()), 0);

    std::optional<std::chrono::sys_seconds> prev;
    for (const RevisionEvent& e : log.events) {
        auto day = cal.day_index(e.timestamp);
        if (!day || *day < w.first_day || *day >= w.first_day + w.day_count) {
            prev.reset();
            continue;
        }
        bool new_session = !prev || (e.timestamp - *prev) > idle_gap;
        if (new_session) {
            ++sessions_per_week[static_cast<std::size_t>((*day - w.first_day) / 7)];
        }
        prev = e.timestamp;
    }

    std::vector<WeeklyEditCategory> out;
    out.reserve(sessions_per_week.size());
    for (std::size_t week = 0; week < sessions_per_week.size(); ++week) {
        out.push_back({cal.week_of_day(w.first_day + static_cast<int>(week) * 7),
                       categorize(sessions_per_week[week])});
    }
    return out;
}

void write_features_csv(std::ostream& out, std::span<const StudentFeatures> rows) {
    static const std::vector<std::string> header = {
        "student_id",       "window",           "TotalRev",      "AvgStrCountPerDay",
        "AvgRevPerDay",     "TotalActiveDay",   "AvgStrCountPerWeek",
        "AvgRevPerWeek",    "TotalActiveWeek"};
    csv::write_row(out, header);
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    std::vector<std::string> row(9);
    for (const StudentFeatures& f : rows) {
        row[0] = f.student_id;
        row[1] = to_string(f.window);
        row[2] = std::to_string(f.total_rev);
        row[3] = fmt(f.avg_str_count_per_day);
        row[4] = fmt(f.avg_rev_per_day);
        row[5] = std::to_string(f.total_active_day);
        row[6] = fmt(f.avg_str_count_per_week);
        row[7] = fmt(f.avg_rev_per_week);
        row[8] = std::to_string(f.total_active_week);
        csv::write_row(out, row);
    }
}

} // namespace revana
