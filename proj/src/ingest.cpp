#include "driftdiff/ingest.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "driftdiff/errors.hpp"
#include "driftdiff/table.hpp"

namespace driftdiff {

PriceSeries load_prices(const std::string& path, const ColumnSpec& spec) {
    const Table t = read_table(path);
    const std::size_t date_col = t.column(spec.date_column);
    const std::size_t price_col = t.column(spec.price_column);

    PriceSeries p;
    p.label = path;
    p.dates.reserve(t.rows.size());
    p.values.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const std::size_t line = i + 2;  // header is line 1
        Date d;
        try {
            d = parse_date(t.rows[i][date_col], spec.date_format);
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(line) + ": " + e.what());
        }
        const double value = parse_double(t.rows[i][price_col], line);
        if (!(value > 0.0)) {
            throw ValidationError(path + ":" + std::to_string(line) +
                                  ": non-positive price " + t.rows[i][price_col]);
        }
        p.dates.push_back(d);
        p.values.push_back(value);
    }

    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p.dates[a] < p.dates[b]; });
    PriceSeries sorted;
    sorted.label = p.label;
    sorted.dates.reserve(p.size());
    sorted.values.reserve(p.size());
    for (std::size_t idx : order) {
        if (!sorted.dates.empty() && sorted.dates.back() == p.dates[idx]) {
            throw ValidationError(path + ": duplicate date " + format_date(p.dates[idx]));
        }
        sorted.dates.push_back(p.dates[idx]);
        sorted.values.push_back(p.values[idx]);
    }
    validate(sorted);
    return sorted;
}

void write_returns(const std::string& path, const ReturnSeries& r) {
    std::ostringstream out;
    out << "date,return\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        out << format_date(r.dates[i]) << ',' << format_full(r.values[i]) << '\n';
    }
    write_text_file(path, out.str());
}

ReturnSeries read_returns(const std::string& path, const std::string& date_column,
                          const std::string& return_column) {
    const Table t = read_table(path);
    const std::size_t date_col = t.column(date_column);
    const std::size_t ret_col = t.column(return_column);
    ReturnSeries r;
    r.label = path;
    r.dates.reserve(t.rows.size());
    r.values.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const std::size_t line = i + 2;
        try {
            r.dates.push_back(parse_date(t.rows[i][date_col]));
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(line) + ": " + e.what());
        }
        r.values.push_back(parse_double(t.rows[i][ret_col], line));
    }
    r.clip_mask.assign(r.values.size(), 0);
    r.sigma = sample_std(r.values);
    return r;
}

}  // namespace driftdiff
