#include "revana/feedback.hpp"

#include "revana/errors.hpp"
#include "revana/svg.hpp"

#include <algorithm>
#include <numeric>

namespace revana {

namespace {

bool day_active(const DailySeries& s, int d) {
    return s.chars[d] + static_cast<double>(s.revisions[d]) > 0.0;
}

double mean_chars(const DailySeries& s) {
    if (s.chars.empty()) return 0.0;
    return std::accumulate(s.chars.begin(), s.chars.end(), 0.0) /
           static_cast<double>(s.chars.size());
}

void check_aligned(const FeedbackInput& input) {
    const DailySeries& a = input.student_series_h1;
    const DailySeries& b = input.cohort_series_h1;
    const DailySeries& c = input.reference_cohort_series_h1;
    if (a.days() != b.days() || a.days() != c.days() || a.days() == 0 ||
        a.days() % 7 != 0) {
        raise(ErrorCode::InvalidArgument,
              "feedback series must cover the same whole-week window");
    }
}

// Light whitespace cleanup so empty clauses do not leave double spaces.
std::string tidy(std::string text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == ' ' && !out.empty() && out.back() == ' ') continue;
        if (c == '\n' && !out.empty() && out.back() == ' ') out.pop_back();
        out.push_back(c);
    }
    return out;
}

} // namespace

PatternSummary classify_pattern(const StudentFeatures& features, const DailySeries& student,
                                const DailySeries& cohort, const DailySeries& reference,
                                FeedbackOptions opts) {
    (void)features;
    if (student.days() == 0 || student.days() % 7 != 0) {
        raise(ErrorCode::InvalidArgument, "pattern window must be whole weeks");
    }
    const int weeks = student.days() / 7;

    PatternSummary p;
    double total = 0.0;
    std::vector<double> week_chars(static_cast<std::size_t>(weeks), 0.0);
    int first_active_day = -1;
    for (int d = 0; d < student.days(); ++d) {
        total += student.chars[d];
        week_chars[static_cast<std::size_t>(d / 7)] += student.chars[d];
        if (day_active(student, d)) {
            if (first_active_day < 0) first_active_day = d;
        }
    }
    for (int w = 0; w < weeks; ++w) {
        bool active = false;
        for (int d = w * 7; d < (w + 1) * 7; ++d) active = active || day_active(student, d);
        if (active) ++p.active_weeks;
    }
    if (total > 0.0) {
        for (int w = 0; w < weeks; ++w) {
            if (week_chars[static_cast<std::size_t>(w)] > opts.dominant_week_share * total) {
                p.dominant_week = w + 1;
                break;
            }
        }
    }
    p.late_start = first_active_day >= 0 && (first_active_day / 7 + 1) >= opts.late_start_week;
    p.cohort_ahead = mean_chars(cohort) > mean_chars(reference);
    return p;
}

std::string default_feedback_template() {
    return
        "Dear student,\n"
        "\n"
        "Thank you for keeping up with your individual reflections. You will\n"
        "already have received comments on the content of your writing inside\n"
        "the shared document; this message looks only at your writing\n"
        "behaviour, to help you plan and regulate the work itself.\n"
        "\n"
        "Earlier research on reflective writing found that students with\n"
        "strong self-regulation tend to reserve a regular time slot for the\n"
        "task, act on feedback promptly, and avoid leaving the work until the\n"
        "deadline. Those habits, more than sheer volume, are what the\n"
        "reflection task is designed to build.\n"
        "\n"
        "The attached chart ({{chart_ref}}) compares the number of edited\n"
        "characters per day over the first five weeks for you (red), last\n"
        "year's cohort (blue) and this year's cohort (green).\n"
        "{{cohort_comparison_clause}}\n"
        "\n"
        "In the first five weeks, you have been active for {{active_weeks}} weeks.\n"
        "{{dominant_week_clause}} {{late_start_clause}}\n"
        "\n"
        "Where to next: try to reserve a specific time each week for the\n"
        "reflection, ideally soon after the readings or the discussion while\n"
        "they are fresh. Writing a little every week is worth more than\n"
        "writing a lot in one sitting; a steady pattern of reflection\n"
        "supports learning more than a high volume of edits does.\n"
        "\n"
        "These figures are shared for reflective purposes, not part of your\n"
        "summative assessment. We look forward to reading your next\n"
        "reflections.\n"
        "\n"
        "Best regards,\n"
        "The teaching team\n";
}

std::string render_feedback_email(const FeedbackInput& input,
                                  std::string_view template_text) {
    check_aligned(input);
    const PatternSummary& p = input.pattern;
    const int weeks = input.student_series_h1.days() / 7;

    std::string dominant_clause;
    if (p.dominant_week) {
        dominant_clause = "Most of your writing so far landed in Week " +
                          std::to_string(*p.dominant_week) +
                          "; spreading that effort across the weeks usually makes the "
                          "reflections deeper and easier to write.";
    } else if (p.active_weeks == weeks) {
        dominant_clause =
            "You have written in every week so far - an excellent, steady routine.";
    }

    std::string late_clause;
    if (p.late_start) {
        late_clause =
            "The log also shows a later start; beginning in the first couple of weeks "
            "gives each topic more room to settle before you reflect on it.";
    }

    std::string cohort_clause =
        p.cohort_ahead
            ? "Compared to last year, your cohort has been the more active one so far - "
              "well done, and keep it going!"
            : "Your cohort and last year's have kept a similar level of activity so far.";

    auto slot_value = [&](const std::string& name) -> std::string {
        if (name == "active_weeks") return std::to_string(p.active_weeks);
        if (name == "dominant_week_clause") return dominant_clause;
        if (name == "late_start_clause") return late_clause;
        if (name == "cohort_comparison_clause") return cohort_clause;
        if (name == "chart_ref") return input.student_id + ".svg";
        raise(ErrorCode::UnboundSlot, name);
    };

    std::string out;
    out.reserve(template_text.size() + 128);
    std::size_t pos = 0;
    while (pos < template_text.size()) {
        std::size_t open = template_text.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(template_text.substr(pos));
            break;
        }
        out.append(template_text.substr(pos, open - pos));
        std::size_t close = template_text.find("}}", open + 2);
        if (close == std::string_view::npos) {
            raise(ErrorCode::UnboundSlot, "unterminated slot marker");
        }
        std::string name(template_text.substr(open + 2, close - open - 2));
        out.append(slot_value(name));
        pos = close + 2;
    }
    return tidy(out);
}

std::string render_comparison_chart(const FeedbackInput& input) {
    check_aligned(input);
    svg::LineChart chart;
    chart.title = "Daily writing activity, first five weeks";
    chart.x_label = "Day (vertical lines mark Mondays)";
    chart.y_label = "Edited characters per day";
    chart.series = {
        {"You", "#d62728", input.student_series_h1.chars},
        {"Last year's cohort", "#1f77b4", input.reference_cohort_series_h1.chars},
        {"This year's cohort", "#2ca02c", input.cohort_series_h1.chars},
    };
    for (int d = 1; d <= input.student_series_h1.days(); d += 7) {
        chart.x_gridlines.push_back(d);
    }
    chart.x_gridlines.push_back(input.student_series_h1.days());
    return chart.render();
}

} // namespace revana
