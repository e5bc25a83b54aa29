#ifndef AQUACAST_TEST_HELPERS_HPP
#define AQUACAST_TEST_HELPERS_HPP

#include "aquacast/billing.hpp"
#include "aquacast/calendar.hpp"

#include <random>
#include <vector>

namespace aquacast::testing {

/// Contiguous daily series starting at `start`.
inline DailySeries make_series(Date start, const std::vector<double>& values) {
    std::vector<DailyPoint> points;
    points.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        points.push_back({start + static_cast<long>(i), values[i]});
    }
    return DailySeries::from_points(std::move(points));
}

/// Series over explicit dates (gaps allowed via the date list).
inline DailySeries make_series(const std::vector<Date>& dates,
                               const std::vector<double>& values) {
    std::vector<DailyPoint> points;
    for (size_t i = 0; i < dates.size(); ++i) {
        points.push_back({dates[i], values[i]});
    }
    return DailySeries::from_points(std::move(points));
}

/// Independent per-day accumulation oracle for the billing estimate:
/// outer loop over days, inner loop over records in input order.
inline std::vector<DailyPoint> brute_force_daily(
    const std::vector<BillingRecord>& records) {
    long lo = records.front().period_start.days_since_epoch();
    long hi = records.front().period_end.days_since_epoch();
    for (const auto& r : records) {
        lo = std::min(lo, r.period_start.days_since_epoch());
        hi = std::max(hi, r.period_end.days_since_epoch());
    }
    std::vector<DailyPoint> out;
    for (long day = lo; day <= hi; ++day) {
        double total = 0.0;
        bool covered = false;
        for (const auto& r : records) {
            if (day >= r.period_start.days_since_epoch() &&
                day <= r.period_end.days_since_epoch()) {
                total += r.consumption / static_cast<double>(r.period_days());
                covered = true;
            }
        }
        if (covered) out.push_back({Date(day), total});
    }
    return out;
}

inline std::vector<BillingRecord> random_billing_records(size_t count,
                                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> start_offset(0, 700);
    std::uniform_int_distribution<long> length(1, 40);
    std::uniform_real_distribution<double> consumption(0.0, 500.0);
    Date base(2019, 1, 1);
    std::vector<BillingRecord> records;
    records.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        Date start = base + start_offset(rng);
        records.push_back({"c" + std::to_string(i), start, start + (length(rng) - 1),
                           consumption(rng)});
    }
    return records;
}

} // namespace aquacast::testing

#endif
