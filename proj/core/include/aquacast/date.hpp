#ifndef AQUACAST_DATE_HPP
#define AQUACAST_DATE_HPP

#include <chrono>
#include <compare>
#include <optional>
#include <string>

namespace aquacast {

/**
 * Calendar date with day resolution, stored as days since 1970-01-01.
 * Billing data carries no time component, so all arithmetic is plain
 * calendar-day arithmetic with no timezone involvement.
 */
class Date {
public:
    Date() : days_(0) {}
    explicit Date(long days_since_epoch) : days_(days_since_epoch) {}
    Date(int year, unsigned month, unsigned day);

    /// Days since 1970-01-01 (may be negative).
    long days_since_epoch() const { return days_; }

    int year() const;
    unsigned month() const;
    unsigned day() const;

    /// ISO-8601 "YYYY-MM-DD".
    std::string to_string() const;

    /// Parse "YYYY-MM-DD"; nullopt on malformed or non-existent dates.
    static std::optional<Date> parse(const std::string& text);

    Date operator+(long days) const { return Date(days_ + days); }
    Date operator-(long days) const { return Date(days_ - days); }
    long operator-(Date other) const { return days_ - other.days_; }
    Date& operator++() { ++days_; return *this; }

    auto operator<=>(const Date&) const = default;

private:
    long days_;
};

} // namespace aquacast

#endif
