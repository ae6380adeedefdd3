#pragma once

#include "revana/calendar.hpp"
#include "revana/revlog.hpp"
#include "revana/srl.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace revana::sim {

enum class WeeklyPattern { UnimodalSunday, BimodalWedSat, Uniform };

const char* to_string(WeeklyPattern p);

/// Day-of-week weights (Monday first) with mean 1, so the log-normal
/// volume parameters keep their scale under any pattern.
std::array<double, 7> pattern_weights(WeeklyPattern p);

struct SimProfile {
    WeeklyPattern weekly_pattern = WeeklyPattern::Uniform;
    double volume_log_mean = 6.0; // log chars; exp(6) ~ 403 chars/day
    double volume_log_sd = 0.8;
    double inactive_prob = 0.35;
    SrlCluster srl_level = SrlCluster::High;
    double post_intervention_multiplier = 1.0; // applied from the intervention week
    int response_delay_days = 0;
    double deletion_fraction = 0.15;
};

struct GeneratedStudent {
    std::string student_id;
    SimProfile profile;
    std::vector<double> realized_daily_chars; // sum of event deltas per day
    RevisionLog log;
};

struct GeneratedCohort {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<GeneratedStudent> students;
};

/// Deterministic given (profiles, calendar, seed): per-student streams are
/// split from the cohort seed, so generation order never matters.
GeneratedCohort generate_cohort(const std::vector<std::pair<int, SimProfile>>& profiles,
                                const SemesterCalendar& cal, std::uint64_t seed,
                                const std::string& cohort_name,
                                const std::string& id_prefix);

/// Deterministic SRL questionnaire responses consistent with each
/// student's simulated level (used to exercise the clustering path).
std::vector<SrlResponse> questionnaire_responses(const GeneratedCohort& cohort,
                                                 LikertScale scale = {});

nlohmann::json ground_truth_json(const GeneratedCohort& cohort);

} // namespace revana::sim
