#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace revana {

enum class EditKind { Insertion, Deletion };

/// One edit action from a document revision log. Field semantics follow the
/// export format: character offsets, a chronological revision counter and a
/// second-precision timestamp. Timestamps are stored normalized to UTC.
struct RevisionEvent {
    EditKind kind = EditKind::Insertion;
    std::int64_t start_index = 0;
    std::int64_t end_index = 0;
    std::string payload; // inserted content; empty for deletions
    std::int64_t revision_number = 0;
    std::string user_id;
    std::chrono::sys_seconds timestamp{};
};

struct RevisionLog {
    std::string document_id;
    std::string student_id;
    std::vector<RevisionEvent> events; // sorted by revision_number
};

/// Unicode scalar count of a UTF-8 string (continuation bytes skipped).
std::size_t utf8_length(std::string_view s);

/// Characters touched by one event: payload length for insertions, span
/// length (end - start) for deletions.
std::int64_t event_char_delta(const RevisionEvent& e);

struct ParseOptions {
    /// Offset applied to timestamps that carry no explicit UTC offset,
    /// i.e. naive timestamps are read as local time in this offset.
    int default_utc_offset_minutes = 0;
};

/// Parses a revision-log CSV export. Expects a header naming the seven
/// columns kind,start_index,end_index,payload,revision,user_id,timestamp
/// (case-insensitive, any order). Rows must arrive in strictly increasing
/// revision order with non-decreasing timestamps; anything else signals a
/// corrupted export.
RevisionLog parse_revision_log(std::istream& in, std::string student_id,
                               ParseOptions opts = {});

/// Canonical CSV form of a log; parse(write(parse(x))) round-trips.
void write_revision_log(std::ostream& out, const RevisionLog& log);

/// Checks all RevisionEvent/RevisionLog invariants, throwing on violation.
void validate_log(const RevisionLog& log);

/// Accepts YYYY-MM-DD{T, }HH:MM[:SS][.fff][Z|+HH:MM|-HH:MM|+HHMM].
/// Fractional seconds are truncated. Returns the UTC instant.
std::chrono::sys_seconds parse_iso8601(std::string_view text,
                                       int default_utc_offset_minutes = 0);

std::string format_iso8601_utc(std::chrono::sys_seconds t);

std::string format_date(std::chrono::sys_days d);

} // namespace revana
