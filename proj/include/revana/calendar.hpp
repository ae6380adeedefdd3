#pragma once

#include "revana/revlog.hpp"

#include <chrono>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace revana {

/// Semester halves around the mid-term feedback point, plus the whole term.
enum class Period { H1, H2, Full };

const char* to_string(Period p);

/// The module calendar: a fixed number of whole weeks starting on a Monday.
/// Day boundaries are local midnights in the calendar's UTC offset.
struct SemesterCalendar {
    std::chrono::year_month_day start_monday{};
    int weeks = 10;
    int intervention_week = 6; // first week counted in H2, 1-based
    std::chrono::weekday lecture_weekday = std::chrono::Tuesday;
    int utc_offset_minutes = 0;

    static SemesterCalendar make(std::chrono::year_month_day start, int weeks = 10,
                                 int intervention_week = 6, int utc_offset_minutes = 0);

    int day_count() const { return weeks * 7; }
    std::chrono::sys_days start_day() const { return std::chrono::sys_days(start_monday); }

    /// Index of the calendar day containing the instant, or nullopt when
    /// the event falls outside the semester span.
    std::optional<int> day_index(std::chrono::sys_seconds t) const;

    int week_of_day(int day) const { return day / 7 + 1; } // 1-based
    int weekday_of_day(int day) const { return day % 7; }  // 0 = Monday
};

/// Contiguous run of calendar days [first_day, first_day + day_count).
struct DayWindow {
    int first_day = 0;
    int day_count = 0;
    Period period = Period::Full;

    int week_count() const { return day_count / 7; }
};

DayWindow window(const SemesterCalendar& cal, Period p);

struct SeriesOwner {
    enum class Kind { Student, CohortAverage };
    Kind kind = Kind::Student;
    std::string id;
};

/// Per-day engagement values over a contiguous date range, zero-filled on
/// days without events.
struct DailySeries {
    SeriesOwner owner;
    std::chrono::sys_days start{};
    std::vector<double> chars;
    std::vector<std::int64_t> revisions;

    int days() const { return static_cast<int>(chars.size()); }
};

/// Whether deletions contribute to the edited-character totals.
enum class CountMode { Both, InsertOnly };

struct DailySeriesBuild {
    DailySeries series;
    int events_out_of_calendar = 0; // warning, not an error
};

DailySeriesBuild build_daily_series(const RevisionLog& log, const SemesterCalendar& cal,
                                    CountMode mode = CountMode::Both);

/// Per-day arithmetic mean across all member series; fully inactive
/// students stay in the denominator.
DailySeries cohort_daily_average(std::span<const DailySeries> members,
                                 std::string cohort_label);

DailySeries slice(const DailySeries& s, DayWindow w);

/// The seven engagement features over an assessment window. Averages are
/// intensities over all days/weeks of the window, not only active ones.
struct StudentFeatures {
    std::string student_id;
    Period window = Period::Full;
    std::int64_t total_rev = 0;
    double avg_str_count_per_day = 0.0;
    double avg_rev_per_day = 0.0;
    int total_active_day = 0;
    double avg_str_count_per_week = 0.0;
    double avg_rev_per_week = 0.0;
    int total_active_week = 0;
};

StudentFeatures student_features(const DailySeries& full, const SemesterCalendar& cal,
                                 Period period);

enum class EditFrequency { NoEdit, Once, TwiceOrMore };

const char* to_string(EditFrequency f);

struct WeeklyEditCategory {
    int week = 0; // 1-based calendar week
    EditFrequency category = EditFrequency::NoEdit;
};

/// Week-level frequency from active-day counts: 0 days, 1 day, 2+ days.
std::vector<WeeklyEditCategory> weekly_edit_categories(const DailySeries& full,
                                                       const SemesterCalendar& cal,
                                                       Period period);

/// Sensitivity variant counting writing sessions instead of active days; a
/// session is a maximal event run with gaps no longer than idle_gap.
std::vector<WeeklyEditCategory> weekly_session_categories(
    const RevisionLog& log, const SemesterCalendar& cal, Period period,
    std::chrono::seconds idle_gap = std::chrono::minutes(30));

/// One row per student per window, feature columns named as reported.
void write_features_csv(std::ostream& out, std::span<const StudentFeatures> rows);

} // namespace revana
