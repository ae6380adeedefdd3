#include "revana/simcohort.hpp"

#include "revana/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace revana::sim {

namespace {

// splitmix64; used to derive independent per-student streams from one seed.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// xorshift-based stream with explicit distributions; keeps generated data
/// byte-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x2545f4914f6cdd1dULL)) {}

    std::uint64_t bits() {
        state_ = mix(state_);
        return state_;
    }

    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

    double normal() {
        // Box-Muller, fresh pair each call; u clamped away from zero.
        double u = std::max(uniform01(), 0x1.0p-53);
        double v = uniform01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
    }

    double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

private:
    std::uint64_t state_;
};

std::string random_text(Rng& rng, std::int64_t length) {
    static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz    ";
    std::string out;
    out.reserve(static_cast<std::size_t>(length));
    for (std::int64_t i = 0; i < length; ++i) {
        char c = kAlphabet[rng.below(sizeof(kAlphabet) - 1)];
        if ((i == 0 || i + 1 == length) && c == ' ') c = 'a';
        out.push_back(c);
    }
    return out;
}

GeneratedStudent generate_student(const SimProfile& profile, const SemesterCalendar& cal,
                                  std::uint64_t stream_seed, std::string student_id) {
    Rng rng(stream_seed);
    const auto weights = pattern_weights(profile.weekly_pattern);
    const int h2_start = (cal.intervention_week - 1) * 7;

    GeneratedStudent out;
    out.student_id = student_id;
    out.profile = profile;
    out.realized_daily_chars.assign(static_cast<std::size_t>(cal.day_count()), 0.0);
    out.log.student_id = student_id;
    out.log.document_id = std::move(student_id);

    std::int64_t doc_length = 0;
    std::int64_t revision = 0;
    for (int d = 0; d < cal.day_count(); ++d) {
        double u_active = rng.uniform01();
        double volume = rng.lognormal(profile.volume_log_mean, profile.volume_log_sd);
        if (u_active < profile.inactive_prob) continue;

        double mult = 1.0;
        if (d >= h2_start + profile.response_delay_days) {
            mult = profile.post_intervention_multiplier;
        }
        double day_chars = volume * weights[static_cast<std::size_t>(d % 7)] * mult;
        auto total = static_cast<std::int64_t>(std::llround(day_chars));
        if (total < 1) total = 1;

        int n_events = 1 + static_cast<int>(rng.below(3));
        std::vector<std::int64_t> parts;
        std::int64_t remaining = total;
        for (int e = 0; e < n_events && remaining > 0; ++e) {
            std::int64_t part =
                e + 1 == n_events
                    ? remaining
                    : std::max<std::int64_t>(
                          1, static_cast<std::int64_t>(std::llround(
                                 static_cast<double>(remaining) * (0.3 + 0.4 * rng.uniform01()))));
            part = std::min(part, remaining);
            parts.push_back(part);
            remaining -= part;
        }

        // Timestamps land between 08:00 and 23:00 local, sorted within the day.
        std::vector<std::int64_t> offsets;
        offsets.reserve(parts.size());
        for (std::size_t e = 0; e < parts.size(); ++e) {
            offsets.push_back(8 * 3600 +
                              static_cast<std::int64_t>(rng.uniform01() * 15.0 * 3600.0));
        }
        std::sort(offsets.begin(), offsets.end());

        std::chrono::sys_seconds day_start_utc =
            std::chrono::sys_seconds(cal.start_day() + std::chrono::days(d)) -
            std::chrono::minutes(cal.utc_offset_minutes);

        for (std::size_t e = 0; e < parts.size(); ++e) {
            RevisionEvent ev;
            ev.revision_number = ++revision;
            ev.user_id = out.log.student_id;
            ev.timestamp = day_start_utc + std::chrono::seconds(offsets[e]);

            bool deletion = doc_length > 0 && rng.uniform01() < profile.deletion_fraction;
            if (deletion) {
                std::int64_t span = std::min(parts[e], doc_length);
                std::int64_t start =
                    static_cast<std::int64_t>(rng.below(
                        static_cast<std::uint64_t>(doc_length - span + 1)));
                ev.kind = EditKind::Deletion;
                ev.start_index = start;
                ev.end_index = start + span;
                doc_length -= span;
                out.realized_daily_chars[static_cast<std::size_t>(d)] +=
                    static_cast<double>(span);
            } else {
                std::int64_t start =
                    static_cast<std::int64_t>(rng.below(
                        static_cast<std::uint64_t>(doc_length + 1)));
                ev.kind = EditKind::Insertion;
                ev.start_index = start;
                ev.end_index = start + parts[e];
                ev.payload = random_text(rng, parts[e]);
                doc_length += parts[e];
                out.realized_daily_chars[static_cast<std::size_t>(d)] +=
                    static_cast<double>(parts[e]);
            }
            out.log.events.push_back(std::move(ev));
        }
    }
    return out;
}

} // namespace

const char* to_string(WeeklyPattern p) {
    switch (p) {
        case WeeklyPattern::UnimodalSunday: return "unimodal_sunday";
        case WeeklyPattern::BimodalWedSat: return "bimodal_wed_sat";
        case WeeklyPattern::Uniform: return "uniform";
    }
    return "?";
}

std::array<double, 7> pattern_weights(WeeklyPattern p) {
    switch (p) {
        case WeeklyPattern::UnimodalSunday:
            // Thursday trough, Sunday peak.
            return {0.9, 0.8, 0.7, 0.4, 0.8, 1.2, 2.2};
        case WeeklyPattern::BimodalWedSat:
            // Local maxima on Wednesday and Saturday, Thursday trough.
            return {0.7, 0.9, 1.6, 0.3, 0.8, 1.7, 1.0};
        case WeeklyPattern::Uniform:
            return {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    }
    return {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
}

GeneratedCohort generate_cohort(const std::vector<std::pair<int, SimProfile>>& profiles,
                                const SemesterCalendar& cal, std::uint64_t seed,
                                const std::string& cohort_name,
                                const std::string& id_prefix) {
    int total = 0;
    for (const auto& [count, profile] : profiles) total += count;
    if (total < 1) raise(ErrorCode::InvalidArgument, "cohort needs at least one student");

    GeneratedCohort cohort;
    cohort.name = cohort_name;
    cohort.seed = seed;
    cohort.students.reserve(static_cast<std::size_t>(total));

    int index = 0;
    for (const auto& [count, profile] : profiles) {
        for (int i = 0; i < count; ++i, ++index) {
            char id[64];
            std::snprintf(id, sizeof(id), "%s%03d", id_prefix.c_str(), index + 1);
            std::uint64_t stream =
                mix(seed ^ mix(static_cast<std::uint64_t>(index) + 0x51ed270b0a1ULL));
            cohort.students.push_back(generate_student(profile, cal, stream, id));
        }
    }
    return cohort;
}

std::vector<SrlResponse> questionnaire_responses(const GeneratedCohort& cohort,
                                                 LikertScale scale) {
    std::vector<SrlResponse> out;
    out.reserve(cohort.students.size());
    double span = static_cast<double>(scale.max_value - scale.min_value);
    for (std::size_t s = 0; s < cohort.students.size(); ++s) {
        const GeneratedStudent& st = cohort.students[s];
        Rng rng(mix(cohort.seed ^ mix(0xabcde12345ULL + s)));
        // High-SRL students answer near the top of the scale, low near the
        // lower middle, with per-item jitter.
        double centre = st.profile.srl_level == SrlCluster::High
                            ? scale.min_value + 0.78 * span
                            : scale.min_value + 0.30 * span;
        SrlResponse r;
        r.student_id = st.student_id;
        for (int i = 0; i < kSrlItemCount; ++i) {
            double v = centre + 0.55 * rng.normal();
            int score = static_cast<int>(std::lround(v));
            r.item_scores[i] = std::clamp(score, scale.min_value, scale.max_value);
        }
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json ground_truth_json(const GeneratedCohort& cohort) {
    nlohmann::json j;
    j["cohort"] = cohort.name;
    j["seed"] = cohort.seed;
    nlohmann::json students = nlohmann::json::array();
    for (const GeneratedStudent& s : cohort.students) {
        nlohmann::json js;
        js["student_id"] = s.student_id;
        js["profile"] = {
            {"weekly_pattern", to_string(s.profile.weekly_pattern)},
            {"volume_log_mean", s.profile.volume_log_mean},
            {"volume_log_sd", s.profile.volume_log_sd},
            {"inactive_prob", s.profile.inactive_prob},
            {"srl_level", to_string(s.profile.srl_level)},
            {"post_intervention_multiplier", s.profile.post_intervention_multiplier},
            {"response_delay_days", s.profile.response_delay_days},
            {"deletion_fraction", s.profile.deletion_fraction},
        };
        js["realized_daily_chars"] = s.realized_daily_chars;
        js["total_events"] = s.log.events.size();
        students.push_back(std::move(js));
    }
    j["students"] = std::move(students);
    return j;
}

} // namespace revana::sim
