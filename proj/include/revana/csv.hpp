#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revana::csv {

/// Incremental RFC-4180 record reader. Quoted fields may contain commas,
/// doubled quotes and newlines. Blank records are skipped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads the next record into `row`. Returns false at end of input.
    /// Throws Error{MalformedRow} on broken quoting.
    bool next(std::vector<std::string>& row);

    /// 1-based line number where the last returned record started.
    int record_line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    int line_ = 1;
    int record_line_ = 0;
};

std::vector<std::vector<std::string>> read_all(std::istream& in);

/// Quotes a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, std::span<const std::string> fields);

} // namespace revana::csv
