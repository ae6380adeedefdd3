#include "revana/feedback.hpp"

#include "doctest.h"
#include "revana/errors.hpp"

#include <fstream>
#include <sstream>

using namespace revana;
using doctest::Approx;

namespace {

DailySeries h1_series(std::vector<double> chars, const std::string& id,
                      SeriesOwner::Kind kind = SeriesOwner::Kind::Student) {
    DailySeries s;
    s.owner = {kind, id};
    s.start = std::chrono::sys_days(std::chrono::year{2021} / std::chrono::September /
                                    std::chrono::day{27});
    s.revisions.assign(chars.size(), 0);
    for (std::size_t i = 0; i < chars.size(); ++i) {
        if (chars[i] > 0) s.revisions[i] = 1;
    }
    s.chars = std::move(chars);
    return s;
}

FeedbackInput fixture_input() {
    // Active weeks 2, 4 and 5 with the bulk of the writing in week 5.
    std::vector<double> student(35, 0.0);
    student[8] = 120;   // week 2
    student[22] = 150;  // week 4
    student[29] = 900;  // week 5
    student[32] = 650;  // week 5
    std::vector<double> cohort(35, 0.0);
    std::vector<double> reference(35, 0.0);
    for (int d = 0; d < 35; ++d) {
        cohort[d] = 950.0 + 13.0 * (d % 7);
        reference[d] = 640.0 + 11.0 * ((d + 3) % 7);
    }
    FeedbackInput in;
    in.student_id = "stu42";
    in.student_series_h1 = h1_series(student, "stu42");
    in.cohort_series_h1 = h1_series(cohort, "intervention", SeriesOwner::Kind::CohortAverage);
    in.reference_cohort_series_h1 =
        h1_series(reference, "control", SeriesOwner::Kind::CohortAverage);
    in.pattern = classify_pattern(in.features_h1, in.student_series_h1, in.cohort_series_h1,
                                  in.reference_cohort_series_h1);
    return in;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing golden file: " << path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("classify_pattern fields") {
    auto in = fixture_input();
    CHECK(in.pattern.active_weeks == 3);
    REQUIRE(in.pattern.dominant_week.has_value());
    CHECK(*in.pattern.dominant_week == 5); // 1550 of 1820 chars
    CHECK(!in.pattern.late_start);         // first activity in week 2
    CHECK(in.pattern.cohort_ahead);

    // All chars in week 5, first event week 4: dominant and late.
    std::vector<double> late(35, 0.0);
    late[24] = 1.0; // week 4 revision-only day via chars>0
    late[30] = 500;
    auto s = h1_series(late, "s");
    StudentFeatures f;
    auto p = classify_pattern(f, s, s, s);
    CHECK(p.late_start);
    REQUIRE(p.dominant_week.has_value());
    CHECK(*p.dominant_week == 5);

    // Uniform activity: no dominant week, five active weeks.
    std::vector<double> uniform(35, 10.0);
    auto pu = classify_pattern(f, h1_series(uniform, "s"), s, s);
    CHECK(pu.active_weeks == 5);
    CHECK(!pu.dominant_week.has_value());
}

TEST_CASE("email contains the three feedback components and is deterministic") {
    auto in = fixture_input();
    std::string email = render_feedback_email(in, default_feedback_template());

    // Goals recap, progress description, prospective suggestion.
    CHECK(email.find("self-regulation") != std::string::npos);
    CHECK(email.find("active for 3") != std::string::npos);
    CHECK(email.find("Where to next") != std::string::npos);
    // Week-5 concentration sentence and the non-summative disclaimer.
    CHECK(email.find("Week 5") != std::string::npos);
    CHECK(email.find("for reflective purposes, not part of your") != std::string::npos);
    CHECK(email.find("summative assessment") != std::string::npos);
    // No grades anywhere.
    CHECK(email.find("grade") == std::string::npos);

    std::string again = render_feedback_email(in, default_feedback_template());
    CHECK(email == again);
}

TEST_CASE("praise clause replaces the concentration clause for steady writers") {
    auto in = fixture_input();
    for (int d = 0; d < 35; ++d) in.student_series_h1.chars[d] = 40.0;
    in.pattern = classify_pattern(in.features_h1, in.student_series_h1, in.cohort_series_h1,
                                  in.reference_cohort_series_h1);
    std::string email = render_feedback_email(in, default_feedback_template());
    CHECK(email.find("active for 5") != std::string::npos);
    CHECK(email.find("every week") != std::string::npos);
    CHECK(email.find("landed in Week") == std::string::npos);
}

TEST_CASE("unknown slots are rejected") {
    auto in = fixture_input();
    CHECK_THROWS_AS(render_feedback_email(in, "hello {{name}}"), Error);
    try {
        render_feedback_email(in, "hello {{name}}");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnboundSlot);
        CHECK(std::string(e.what()).find("name") != std::string::npos);
    }
    CHECK_THROWS_AS(render_feedback_email(in, "broken {{active_weeks"), Error);
}

TEST_CASE("comparison chart structure") {
    auto in = fixture_input();
    std::string chart = render_comparison_chart(in);

    CHECK(chart.rfind("<?xml", 0) == 0);
    CHECK(chart.find("</svg>") != std::string::npos);
    // Three polylines with 35 points each.
    std::size_t count = 0, pos = 0;
    while ((pos = chart.find("<polyline", pos)) != std::string::npos) {
        ++count;
        std::size_t start = chart.find("points=\"", pos) + 8;
        std::size_t end = chart.find('"', start);
        std::string points = chart.substr(start, end - start);
        std::size_t commas = std::count(points.begin(), points.end(), ',');
        CHECK(commas == 35);
        pos = end;
    }
    CHECK(count == 3);
    CHECK(chart.find("#d62728") != std::string::npos); // student red
    CHECK(chart.find("#1f77b4") != std::string::npos); // reference blue
    CHECK(chart.find("#2ca02c") != std::string::npos); // current green

    // All-zero series still render as a valid flat chart.
    FeedbackInput zero = in;
    std::fill(zero.student_series_h1.chars.begin(), zero.student_series_h1.chars.end(), 0.0);
    std::fill(zero.cohort_series_h1.chars.begin(), zero.cohort_series_h1.chars.end(), 0.0);
    std::fill(zero.reference_cohort_series_h1.chars.begin(),
              zero.reference_cohort_series_h1.chars.end(), 0.0);
    std::string flat = render_comparison_chart(zero);
    CHECK(flat.find("</svg>") != std::string::npos);
}

TEST_CASE("chart peak day and scaling order are stable") {
    auto in = fixture_input();
    auto peak_y = [](const std::string& chart) {
        // First polyline is the student; find the minimum pixel y (peak).
        std::size_t pos = chart.find("<polyline");
        std::size_t start = chart.find("points=\"", pos) + 8;
        std::size_t end = chart.find('"', start);
        std::istringstream points(chart.substr(start, end - start));
        std::string pair;
        int best_day = -1, day = 0;
        double best_y = 1e18;
        while (points >> pair) {
            double y = std::stod(pair.substr(pair.find(',') + 1));
            if (y < best_y) {
                best_y = y;
                best_day = day;
            }
            ++day;
        }
        return best_day;
    };
    std::string chart = render_comparison_chart(in);
    CHECK(peak_y(chart) == 29); // the 900-char spike

    FeedbackInput doubled = in;
    for (auto* s : {&doubled.student_series_h1, &doubled.cohort_series_h1,
                    &doubled.reference_cohort_series_h1}) {
        for (double& v : s->chars) v *= 2.0;
    }
    CHECK(peak_y(render_comparison_chart(doubled)) == 29);
}

TEST_CASE("golden render stays byte-identical") {
    auto in = fixture_input();
    std::string email = render_feedback_email(in, default_feedback_template());
    std::string chart = render_comparison_chart(in);
    CHECK(email == read_file(std::string(TESTS_DIR) + "/golden/feedback_email.txt"));
    CHECK(chart == read_file(std::string(TESTS_DIR) + "/golden/feedback_chart.svg"));
}

TEST_CASE("misaligned series are rejected") {
    auto in = fixture_input();
    in.cohort_series_h1.chars.resize(28);
    in.cohort_series_h1.revisions.resize(28);
    CHECK_THROWS_AS(render_comparison_chart(in), Error);
    CHECK_THROWS_AS(render_feedback_email(in, default_feedback_template()), Error);
}
