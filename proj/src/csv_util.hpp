#pragma once

// Internal CSV helpers shared by the I/O translation units; not installed.

#include <charconv>
#include <string>
#include <system_error>
#include <vector>

#include "biofilm/errors.hpp"

namespace biofilm::csv {

// Shortest representation that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw contract_error("failed to format a floating-point value");
    return std::string(buf, ptr);
}

inline double parse_double(const std::string& field, long line) {
    double v{};
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw parse_error("not a number: '" + field + "'", line);
    return v;
}

// Split on commas, dropping spaces, tabs and carriage returns.
inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != ' ' && c != '\t' && c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace biofilm::csv
