#include "aquacast/date.hpp"

#include <cstdio>
#include <stdexcept>

namespace aquacast {

namespace {

std::chrono::year_month_day to_ymd(long days) {
    return std::chrono::year_month_day(
        std::chrono::sys_days(std::chrono::days(days)));
}

} // namespace

Date::Date(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year(year),
                                    std::chrono::month(month),
                                    std::chrono::day(day)};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date");
    }
    days_ = std::chrono::sys_days(ymd).time_since_epoch().count();
}

int Date::year() const { return static_cast<int>(to_ymd(days_).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(days_).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(days_).day()); }

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

std::optional<Date> Date::parse(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    for (size_t i = 0; i < text.size(); ++i) {
        if (i == 4 || i == 7) continue;
        if (text[i] < '0' || text[i] > '9') return std::nullopt;
    }
    int y = std::stoi(text.substr(0, 4));
    unsigned m = static_cast<unsigned>(std::stoi(text.substr(5, 2)));
    unsigned d = static_cast<unsigned>(std::stoi(text.substr(8, 2)));
    std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(m),
                                    std::chrono::day(d)};
    if (!ymd.ok()) return std::nullopt;
    return Date(std::chrono::sys_days(ymd).time_since_epoch().count());
}

} // namespace aquacast
