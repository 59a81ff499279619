#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>

namespace driftdiff {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
struct Date {
    std::int32_t serial = 0;

    auto operator<=>(const Date&) const = default;

    static Date from_ymd(int year, unsigned month, unsigned day);
    std::chrono::year_month_day ymd() const;
};

// Parses `text` against a pattern containing %Y, %m, %d and literal separators,
// e.g. "%Y-%m-%d" or "%d/%m/%Y". Throws ParseError on mismatch or an invalid
// calendar date.
Date parse_date(const std::string& text, const std::string& pattern = "%Y-%m-%d");

// ISO-8601 (YYYY-MM-DD).
std::string format_date(Date d);

// Calendar-month shift; day-of-month is clamped to the target month's length
// (Jan 31 + 1 month -> Feb 28/29).
Date add_months(Date d, int months);

}  // namespace driftdiff
