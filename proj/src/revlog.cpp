#include "revana/revlog.hpp"

#include "revana/csv.hpp"
#include "revana/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

namespace revana {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool parse_int(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void bad_row(int line, const std::string& reason) {
    raise(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": " + reason);
}

struct TimestampParts {
    int year, month, day, hour, minute, second;
    bool has_offset;
    int offset_minutes;
};

bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

} // namespace

std::size_t utf8_length(std::string_view s) {
    std::size_t count = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++count;
    }
    return count;
}

std::int64_t event_char_delta(const RevisionEvent& e) {
    if (e.kind == EditKind::Insertion) {
        return static_cast<std::int64_t>(utf8_length(e.payload));
    }
    return e.end_index - e.start_index;
}

std::chrono::sys_seconds parse_iso8601(std::string_view text, int default_utc_offset_minutes) {
    TimestampParts p{};
    p.has_offset = false;
    p.offset_minutes = 0;
    p.second = 0;

    if (!parse_fixed_int(text, 0, 4, p.year) || text.size() < 16 || text[4] != '-' ||
        !parse_fixed_int(text, 5, 2, p.month) || text[7] != '-' ||
        !parse_fixed_int(text, 8, 2, p.day) || (text[10] != 'T' && text[10] != ' ') ||
        !parse_fixed_int(text, 11, 2, p.hour) || text[13] != ':' ||
        !parse_fixed_int(text, 14, 2, p.minute)) {
        raise(ErrorCode::InvalidArgument, "unparseable timestamp '" + std::string(text) + "'");
    }
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        if (!parse_fixed_int(text, pos + 1, 2, p.second)) {
            raise(ErrorCode::InvalidArgument, "unparseable seconds in '" + std::string(text) + "'");
        }
        pos += 3;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z' || c == 'z') {
            p.has_offset = true;
            pos += 1;
        } else if (c == '+' || c == '-') {
            int oh = 0, om = 0;
            std::size_t rest = text.size() - pos - 1;
            if (rest >= 2 && parse_fixed_int(text, pos + 1, 2, oh)) {
                if (rest >= 5 && text[pos + 3] == ':' && parse_fixed_int(text, pos + 4, 2, om)) {
                    pos += 6;
                } else if (rest >= 4 && parse_fixed_int(text, pos + 3, 2, om)) {
                    pos += 5;
                } else {
                    pos += 3;
                }
                p.has_offset = true;
                p.offset_minutes = (oh * 60 + om) * (c == '-' ? -1 : 1);
            } else {
                raise(ErrorCode::InvalidArgument,
                      "unparseable UTC offset in '" + std::string(text) + "'");
            }
        }
    }
    if (pos != text.size()) {
        raise(ErrorCode::InvalidArgument,
              "trailing characters in timestamp '" + std::string(text) + "'");
    }

    using namespace std::chrono;
    year_month_day ymd{year{p.year}, month{static_cast<unsigned>(p.month)},
                       day{static_cast<unsigned>(p.day)}};
    if (!ymd.ok()) {
        raise(ErrorCode::InvalidArgument, "invalid calendar date '" + std::string(text) + "'");
    }
    if (p.hour > 23 || p.minute > 59 || p.second > 60) {
        raise(ErrorCode::InvalidArgument, "invalid time of day '" + std::string(text) + "'");
    }
    int offset = p.has_offset ? p.offset_minutes : default_utc_offset_minutes;
    sys_seconds local = sys_days(ymd) + hours(p.hour) + minutes(p.minute) + seconds(p.second);
    return local - minutes(offset);
}

std::string format_iso8601_utc(std::chrono::sys_seconds t) {
    using namespace std::chrono;
    auto days_part = floor<std::chrono::days>(t);
    year_month_day ymd{days_part};
    hh_mm_ss tod{t - days_part};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(tod.hours().count()),
                  static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

std::string format_date(std::chrono::sys_days d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

RevisionLog parse_revision_log(std::istream& in, std::string student_id, ParseOptions opts) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) {
        raise(ErrorCode::MissingColumn, "empty input, no header row");
    }

    static constexpr std::array<std::string_view, 7> kColumns = {
        "kind", "start_index", "end_index", "payload", "revision", "user_id", "timestamp"};
    std::array<int, 7> index;
    index.fill(-1);
    for (std::size_t i = 0; i < row.size(); ++i) {
        std::string name = lower(row[i]);
        for (std::size_t c = 0; c < kColumns.size(); ++c) {
            if (name == kColumns[c]) index[c] = static_cast<int>(i);
        }
    }
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
        if (index[c] < 0) {
            raise(ErrorCode::MissingColumn, std::string(kColumns[c]));
        }
    }

    RevisionLog log;
    log.student_id = student_id;
    log.document_id = std::move(student_id);

    std::int64_t prev_revision = 0;
    std::chrono::sys_seconds prev_time{};
    bool first = true;
    while (reader.next(row)) {
        int line = reader.record_line();
        if (row.size() < kColumns.size()) {
            bad_row(line, "expected at least 7 fields, got " + std::to_string(row.size()));
        }
        auto field = [&](int c) -> const std::string& { return row[index[c]]; };

        RevisionEvent e;
        std::string kind = lower(field(0));
        if (kind == "insertion") {
            e.kind = EditKind::Insertion;
        } else if (kind == "deletion") {
            e.kind = EditKind::Deletion;
        } else {
            bad_row(line, "unknown kind '" + field(0) + "'");
        }
        if (!parse_int(field(1), e.start_index) || e.start_index < 0) {
            bad_row(line, "bad start_index '" + field(1) + "'");
        }
        if (!parse_int(field(2), e.end_index) || e.end_index < 0) {
            bad_row(line, "bad end_index '" + field(2) + "'");
        }
        if (e.end_index < e.start_index) {
            bad_row(line, "end_index precedes start_index");
        }
        e.payload = field(3);
        if (e.kind == EditKind::Insertion && e.payload.empty()) {
            bad_row(line, "insertion with empty payload");
        }
        if (e.kind == EditKind::Deletion && !e.payload.empty()) {
            bad_row(line, "deletion with non-empty payload");
        }
        if (!parse_int(field(4), e.revision_number) || e.revision_number <= 0) {
            bad_row(line, "bad revision number '" + field(4) + "'");
        }
        e.user_id = field(5);
        try {
            e.timestamp = parse_iso8601(field(6), opts.default_utc_offset_minutes);
        } catch (const Error& err) {
            bad_row(line, err.what());
        }

        if (!first) {
            if (e.revision_number <= prev_revision) {
                raise(ErrorCode::NonMonotonicRevision,
                      "line " + std::to_string(line) + ": revision " +
                          std::to_string(e.revision_number) + " after " +
                          std::to_string(prev_revision));
            }
            if (e.timestamp < prev_time) {
                raise(ErrorCode::NonMonotonicRevision,
                      "line " + std::to_string(line) +
                          ": timestamp moves backwards across increasing revisions");
            }
        }
        prev_revision = e.revision_number;
        prev_time = e.timestamp;
        first = false;
        log.events.push_back(std::move(e));
    }
    return log;
}

void write_revision_log(std::ostream& out, const RevisionLog& log) {
    static const std::vector<std::string> header = {
        "kind", "start_index", "end_index", "payload", "revision", "user_id", "timestamp"};
    csv::write_row(out, header);
    std::vector<std::string> row(7);
    for (const RevisionEvent& e : log.events) {
        row[0] = e.kind == EditKind::Insertion ? "insertion" : "deletion";
        row[1] = std::to_string(e.start_index);
        row[2] = std::to_string(e.end_index);
        row[3] = e.payload;
        row[4] = std::to_string(e.revision_number);
        row[5] = e.user_id;
        row[6] = format_iso8601_utc(e.timestamp);
        csv::write_row(out, row);
    }
}

void validate_log(const RevisionLog& log) {
    std::int64_t prev_revision = 0;
    std::chrono::sys_seconds prev_time{};
    bool first = true;
    for (const RevisionEvent& e : log.events) {
        if (e.start_index < 0 || e.end_index < e.start_index) {
            raise(ErrorCode::MalformedRow,
                  "revision " + std::to_string(e.revision_number) + ": bad index span");
        }
        if (e.kind == EditKind::Insertion && e.payload.empty()) {
            raise(ErrorCode::MalformedRow,
                  "revision " + std::to_string(e.revision_number) + ": empty insertion");
        }
        if (e.kind == EditKind::Deletion && !e.payload.empty()) {
            raise(ErrorCode::MalformedRow,
                  "revision " + std::to_string(e.revision_number) + ": deletion with payload");
        }
        if (e.revision_number <= 0) {
            raise(ErrorCode::MalformedRow, "non-positive revision number");
        }
        if (!first && (e.revision_number <= prev_revision || e.timestamp < prev_time)) {
            raise(ErrorCode::NonMonotonicRevision,
                  "revision " + std::to_string(e.revision_number));
        }
        prev_revision = e.revision_number;
        prev_time = e.timestamp;
        first = false;
    }
}

} // namespace revana
