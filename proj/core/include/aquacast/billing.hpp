#ifndef AQUACAST_BILLING_HPP
#define AQUACAST_BILLING_HPP

#include "aquacast/date.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace aquacast {

/**
 * One client's metered consumption over one inclusive billing period.
 * Periods are roughly a month long and staggered across clients.
 */
struct BillingRecord {
    std::string client_id;
    Date period_start;
    Date period_end;
    double consumption = 0.0; // cubic metres, >= 0

    long period_days() const { return period_end - period_start + 1; }
};

struct DailyPoint {
    Date date;
    double value = 0.0; // cubic metres
};

/**
 * Date-indexed citywide daily consumption estimates. Dates are strictly
 * increasing; absent dates are gaps, never zeros. Values are finite and
 * non-negative.
 */
class DailySeries {
public:
    DailySeries() = default;

    /// Validates ordering, duplicates and value range; throws on violation.
    static DailySeries from_points(std::vector<DailyPoint> points);

    const std::vector<DailyPoint>& points() const { return points_; }
    size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    Date first_date() const { return points_.front().date; }
    Date last_date() const { return points_.back().date; }
    const DailyPoint& operator[](size_t i) const { return points_[i]; }

    std::vector<Date> dates() const;
    std::vector<double> values() const;

private:
    std::vector<DailyPoint> points_;
};

/// Maximal inclusive date range with no consumption estimate.
struct GapRange {
    Date start;
    Date end;
    bool operator==(const GapRange&) const = default;
};

enum class ParseMode {
    Strict, // first bad row aborts
    Lenient // bad rows skipped and counted
};

struct ParseReport {
    std::vector<BillingRecord> records;
    size_t rows_skipped = 0;
    std::vector<std::string> row_errors; // "line N: reason"
};

/**
 * Parse a billing CSV stream with header
 * `client_id,period_start,period_end,consumption`. In Strict mode the
 * first malformed row throws std::runtime_error naming the line; in
 * Lenient mode malformed rows are skipped and reported.
 */
ParseReport parse_billing(std::istream& source, ParseMode mode);

/**
 * Spread each record's consumption uniformly over its billing period
 * (inclusive day count) and sum per-date contributions across records.
 * Dates covered by no record are absent from the result.
 */
DailySeries estimate_daily(const std::vector<BillingRecord>& records);

/// Maximal ranges of absent dates strictly inside the series span.
std::vector<GapRange> detect_gaps(const DailySeries& series);

/// Daily series CSV: header `date,consumption_m3`, absent dates omitted.
void write_daily_csv(const DailySeries& series, std::ostream& out);
DailySeries read_daily_csv(std::istream& in);

} // namespace aquacast

#endif
