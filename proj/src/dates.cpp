#include "driftdiff/dates.hpp"

#include <cctype>
#include <cstdio>

#include "driftdiff/errors.hpp"

namespace driftdiff {

namespace {

// Reads up to `max_digits` decimal digits, at least one.
bool read_int(const std::string& s, std::size_t& pos, int max_digits, int& out) {
    int value = 0;
    int n = 0;
    while (pos < s.size() && n < max_digits && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        value = value * 10 + (s[pos] - '0');
        ++pos;
        ++n;
    }
    if (n == 0) return false;
    out = value;
    return true;
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        throw ValidationError("invalid calendar date: " + std::to_string(year) + "-" +
                              std::to_string(month) + "-" + std::to_string(day));
    }
    const std::chrono::sys_days sd{ymd};
    return Date{static_cast<std::int32_t>(sd.time_since_epoch().count())};
}

std::chrono::year_month_day Date::ymd() const {
    return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{serial}}};
}

Date parse_date(const std::string& text, const std::string& pattern) {
    int year = 0, month = 0, day = 0;
    bool have_y = false, have_m = false, have_d = false;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] == '%' && i + 1 < pattern.size()) {
            const char spec = pattern[++i];
            bool ok = false;
            switch (spec) {
                case 'Y': ok = read_int(text, pos, 4, year); have_y = ok; break;
                case 'm': ok = read_int(text, pos, 2, month); have_m = ok; break;
                case 'd': ok = read_int(text, pos, 2, day); have_d = ok; break;
                default:
                    throw ParseError(std::string("unsupported date format specifier: %") + spec);
            }
            if (!ok) throw ParseError("date '" + text + "' does not match pattern '" + pattern + "'");
        } else {
            if (pos >= text.size() || text[pos] != pattern[i]) {
                throw ParseError("date '" + text + "' does not match pattern '" + pattern + "'");
            }
            ++pos;
        }
    }
    if (pos != text.size() || !have_y || !have_m || !have_d) {
        throw ParseError("date '" + text + "' does not match pattern '" + pattern + "'");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) throw ParseError("invalid calendar date: '" + text + "'");
    return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

std::string format_date(Date d) {
    const auto ymd = d.ymd();
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date add_months(Date d, int months) {
    auto ymd = d.ymd() + std::chrono::months{months};
    if (!ymd.ok()) {
        ymd = ymd.year() / ymd.month() / std::chrono::last;
    }
    return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

}  // namespace driftdiff
