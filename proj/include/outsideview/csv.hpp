#pragma once

#include <charconv>
#include <cstdlib>
#include <string>
#include <vector>

#include "outsideview/errors.hpp"

namespace outsideview {

// Splits one CSV line. Fields may be double-quoted; "" inside quotes is a
// literal quote. Embedded newlines are not supported (one record per line).
inline std::vector<std::string> split_csv_line(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && field.empty()) {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (in_quotes) {
        throw Error(ErrorCode::MalformedRow,
                    "row " + std::to_string(line_no) + ": unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

inline double parse_double_field(const std::string& raw, int line_no, const char* column) {
    const std::string s = trim(raw);
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw Error(ErrorCode::MalformedRow, "row " + std::to_string(line_no) + ", column " +
                                                 column + ": not a number: '" + raw + "'");
    }
    return value;
}

inline long parse_int_field(const std::string& raw, int line_no, const char* column) {
    const std::string s = trim(raw);
    long value = 0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw Error(ErrorCode::MalformedRow, "row " + std::to_string(line_no) + ", column " +
                                                 column + ": not an integer: '" + raw + "'");
    }
    return value;
}

// Quotes a field when it needs quoting; doubles embedded quotes.
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

// Shortest decimal text that round-trips the double exactly.
inline std::string fmt_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace outsideview
