#include "revana/csv.hpp"

#include "revana/errors.hpp"

namespace revana::csv {

bool Reader::next(std::vector<std::string>& row) {
    row.clear();
    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    bool field_was_quoted = false;

    record_line_ = line_;
    int ch;
    while ((ch = in_.get()) != std::istream::traits_type::eof()) {
        char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                int peek = in_.peek();
                if (peek == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty()) {
                    raise(ErrorCode::MalformedRow,
                          "line " + std::to_string(line_) + ": quote inside unquoted field");
                }
                in_quotes = true;
                saw_any = true;
                field_was_quoted = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                saw_any = true;
                field_was_quoted = false;
                break;
            case '\r':
                break; // tolerate CRLF
            case '\n':
                ++line_;
                if (!saw_any && field.empty() && row.empty()) {
                    record_line_ = line_; // skip blank record
                    continue;
                }
                row.push_back(std::move(field));
                return true;
            default:
                if (field_was_quoted) {
                    raise(ErrorCode::MalformedRow,
                          "line " + std::to_string(line_) + ": content after closing quote");
                }
                field.push_back(c);
                saw_any = true;
        }
    }
    if (in_quotes) {
        raise(ErrorCode::MalformedRow,
              "line " + std::to_string(record_line_) + ": unterminated quoted field");
    }
    if (saw_any || !field.empty()) {
        row.push_back(std::move(field));
        return true;
    }
    return false;
}

std::vector<std::vector<std::string>> read_all(std::istream& in) {
    Reader reader(in);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    while (reader.next(row)) rows.push_back(row);
    return rows;
}

std::string escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << escape(fields[i]);
    }
    out.put('\n');
}

} // namespace revana::csv
