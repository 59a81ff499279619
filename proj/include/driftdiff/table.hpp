#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace driftdiff {

// Minimal delimited-text table: one header row, string cells. The delimiter
// is sniffed from the header (comma, tab or semicolon).
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    char delimiter = ',';

    // Index of a named column, or throws ParseError.
    std::size_t column(const std::string& name) const;
};

Table read_table(const std::string& path);

// Formats a double with 17 significant digits so text round-trips exactly.
std::string format_full(double value);

// Parses a double; accepts "nan". Throws ParseError with context on failure.
double parse_double(const std::string& cell, std::size_t line_number);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace driftdiff
