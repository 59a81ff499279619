#pragma once

#include <string>

#include "driftdiff/series.hpp"

namespace driftdiff {

struct ColumnSpec {
    std::string date_column = "date";
    std::string price_column = "price";
    std::string date_format = "%Y-%m-%d";
};

// Loads a delimited price file (header row required). Rows are sorted by
// date; duplicate dates and non-positive prices are rejected.
PriceSeries load_prices(const std::string& path, const ColumnSpec& spec = {});

// Canonical two-column returns file (date, return), all returns included.
void write_returns(const std::string& path, const ReturnSeries& r);

// Reads a returns file written by write_returns (or any table with the two
// named columns). sigma is recomputed from the values; nothing is masked.
ReturnSeries read_returns(const std::string& path, const std::string& date_column = "date",
                          const std::string& return_column = "return");

}  // namespace driftdiff
