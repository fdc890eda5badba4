#pragma once

#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace codep {

/// Calendar date (no intraday resolution). Parsed from and printed as ISO-8601.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    /// Quarter index 1..4.
    int quarter() const { return (month - 1) / 3 + 1; }

    /// First calendar day of the quarter containing this date.
    Date quarter_start() const { return Date{year, 3 * ((month - 1) / 3) + 1, 1}; }

    /// Label like "2010Q1".
    std::string quarter_label() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04dQ%d", year, quarter());
        return buf;
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    static bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

    static int days_in_month(int y, int m) {
        static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        return m == 2 && is_leap(y) ? 29 : d[m - 1];
    }

    /// Next calendar day.
    Date next() const {
        Date d = *this;
        if (++d.day > days_in_month(d.year, d.month)) {
            d.day = 1;
            if (++d.month > 12) {
                d.month = 1;
                ++d.year;
            }
        }
        return d;
    }

    /// Day of week, 0 = Monday .. 6 = Sunday (Tomohiko Sakamoto).
    int weekday() const {
        static const int t[] = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
        int y = year - (month < 3);
        int dow = (y + y / 4 - y / 100 + y / 400 + t[month - 1] + day) % 7;  // 0=Sunday
        return (dow + 6) % 7;
    }

    bool is_weekend() const { return weekday() >= 5; }

    /// First quarter following this one.
    Date next_quarter_start() const {
        Date q = quarter_start();
        q.month += 3;
        if (q.month > 12) {
            q.month -= 12;
            ++q.year;
        }
        return q;
    }
};

/// Parses "YYYY-MM-DD". Throws std::invalid_argument on malformed input.
inline Date parse_date(const std::string& s) {
    int y, m, d;
    char tail;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3)
        throw std::invalid_argument("not an ISO-8601 date: '" + s + "'");
    if (m < 1 || m > 12 || d < 1 || d > Date::days_in_month(y, m))
        throw std::invalid_argument("date out of range: '" + s + "'");
    return Date{y, m, d};
}

}  // namespace codep
