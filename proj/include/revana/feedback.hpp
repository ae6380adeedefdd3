#pragma once

#include "revana/calendar.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace revana {

/// Behavioural reading of a student's first-half engagement, the raw
/// material for the personalised feedback clauses.
struct PatternSummary {
    int active_weeks = 0;
    std::optional<int> dominant_week; // week holding > half the characters
    bool late_start = false;          // first active day at or past the threshold week
    bool cohort_ahead = false;        // current cohort mean above the reference cohort's
};

struct FeedbackInput {
    std::string student_id;
    DailySeries student_series_h1;
    DailySeries cohort_series_h1;           // current cohort average
    DailySeries reference_cohort_series_h1; // prior-year cohort average
    StudentFeatures features_h1;
    PatternSummary pattern;
};

struct FeedbackOptions {
    double dominant_week_share = 0.5;
    int late_start_week = 3;
};

PatternSummary classify_pattern(const StudentFeatures& features, const DailySeries& student,
                                const DailySeries& cohort, const DailySeries& reference,
                                FeedbackOptions opts = {});

/// The built-in email template; plain text with {{slot}} markers.
std::string default_feedback_template();

/// Fills the template slots. Allowed slots: active_weeks,
/// dominant_week_clause, late_start_clause, cohort_comparison_clause,
/// chart_ref. Anything else raises UnboundSlot. Output is a pure function
/// of the inputs.
std::string render_feedback_email(const FeedbackInput& input, std::string_view template_text);

/// The comparison chart attached to the email: the student in red, the
/// prior-year cohort in blue and the current cohort in green over the
/// 35 first-half days.
std::string render_comparison_chart(const FeedbackInput& input);

} // namespace revana
