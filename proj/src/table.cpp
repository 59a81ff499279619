#include "driftdiff/table.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "driftdiff/errors.hpp"

namespace driftdiff {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string token;
    for (char ch : line) {
        if (ch == delimiter) {
            cells.push_back(trim(token));
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    cells.push_back(trim(token));
    return cells;
}

char sniff_delimiter(const std::string& header) {
    const char candidates[] = {',', '\t', ';'};
    char best = ',';
    std::size_t best_count = 0;
    for (char c : candidates) {
        const std::size_t count = std::count(header.begin(), header.end(), c);
        if (count > best_count) {
            best_count = count;
            best = c;
        }
    }
    return best;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("column '" + name + "' not found in header");
}

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    Table t;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        if (t.header.empty()) {
            t.delimiter = sniff_delimiter(line);
            t.header = split(line, t.delimiter);
            continue;
        }
        auto cells = split(line, t.delimiter);
        if (cells.size() != t.header.size()) {
            throw ParseError(path + ":" + std::to_string(line_number) + ": expected " +
                             std::to_string(t.header.size()) + " fields, got " +
                             std::to_string(cells.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw ParseError(path + ": empty file");
    return t;
}

std::string format_full(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

double parse_double(const std::string& cell, std::size_t line_number) {
    try {
        std::size_t consumed = 0;
        const double v = std::stod(cell, &consumed);
        if (consumed != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_number) + ": not a number: '" + cell + "'");
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace driftdiff
