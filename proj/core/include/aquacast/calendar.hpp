#ifndef AQUACAST_CALENDAR_HPP
#define AQUACAST_CALENDAR_HPP

#include "aquacast/date.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aquacast {

/**
 * Holiday lookup table. Each date maps to at most one holiday name; one
 * name may cover many dates (the same holiday across years), and all
 * occurrences of a name share one fitted coefficient. Dates may extend
 * past the training window so future forecasts keep their holiday
 * effects.
 */
class HolidayTable {
public:
    HolidayTable() = default;

    /// Throws on duplicate date.
    void add(Date date, const std::string& name);

    std::optional<std::string> lookup(Date date) const;

    /// Distinct holiday names, sorted (stable coefficient ordering).
    std::vector<std::string> names() const;

    const std::map<Date, std::string>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

private:
    std::map<Date, std::string> entries_;
};

/// Holiday CSV: header `date,name`, ISO-8601 dates.
HolidayTable load_holidays(std::istream& source);

/**
 * Affine map from calendar dates to model time: the first training date
 * is 0, the last is 1, forecast dates land past 1.
 */
struct TimeScale {
    Date epoch;
    long span_days = 1; // days between first and last training date, > 0

    double to_model_time(Date date) const {
        return static_cast<double>(date - epoch) / static_cast<double>(span_days);
    }
};

} // namespace aquacast

#endif
