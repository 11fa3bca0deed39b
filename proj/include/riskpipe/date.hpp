#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "riskpipe/errors.hpp"

namespace riskpipe {

// Calendar day stored as a serial number (days since 1970-01-01).
// Serial arithmetic makes alignment and lagging trivial.
class Date {
public:
    Date() : serial_(0) {}
    explicit Date(int serial) : serial_(serial) {}

    static Date from_ymd(int y, int m, int d) {
        if (m < 1 || m > 12 || d < 1 || d > 31)
            throw DomainError("invalid calendar date " + std::to_string(y) + "-" +
                              std::to_string(m) + "-" + std::to_string(d));
        return Date(days_from_civil(y, m, d));
    }

    // Strict ISO-8601 YYYY-MM-DD.
    static Date parse(std::string_view s) {
        if (s.size() != 10 || s[4] != '-' || s[7] != '-')
            throw DomainError("unparseable date '" + std::string(s) + "' (expected YYYY-MM-DD)");
        int y = 0, m = 0, d = 0;
        auto num = [&](std::string_view part, int& out) {
            auto res = std::from_chars(part.data(), part.data() + part.size(), out);
            return res.ec == std::errc() && res.ptr == part.data() + part.size();
        };
        if (!num(s.substr(0, 4), y) || !num(s.substr(5, 2), m) || !num(s.substr(8, 2), d))
            throw DomainError("unparseable date '" + std::string(s) + "'");
        return from_ymd(y, m, d);
    }

    std::string to_string() const {
        auto [y, m, d] = civil_from_days(serial_);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
        return std::string(buf);
    }

    int serial() const { return serial_; }
    Date operator+(int days) const { return Date(serial_ + days); }
    Date operator-(int days) const { return Date(serial_ - days); }
    int operator-(Date other) const { return serial_ - other.serial_; }
    auto operator<=>(const Date&) const = default;

private:
    // Howard Hinnant's civil-days algorithms.
    static int days_from_civil(int y, unsigned m, unsigned d) {
        y -= m <= 2;
        const int era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + static_cast<int>(doe) - 719468;
    }

    static std::tuple<int, int, int> civil_from_days(int z) {
        z += 719468;
        const int era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const int y = static_cast<int>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
    }

    int serial_;
};

}  // namespace riskpipe
