#include "aquacast/billing.hpp"
#include "aquacast/util.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace aquacast {

DailySeries DailySeries::from_points(std::vector<DailyPoint> points) {
    for (size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].value) || points[i].value < 0.0) {
            throw std::invalid_argument("daily series value must be finite and >= 0 at " +
                                        points[i].date.to_string());
        }
        if (i > 0 && !(points[i - 1].date < points[i].date)) {
            throw std::invalid_argument("daily series dates must be strictly increasing at " +
                                        points[i].date.to_string());
        }
    }
    DailySeries s;
    s.points_ = std::move(points);
    return s;
}

std::vector<Date> DailySeries::dates() const {
    std::vector<Date> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.date);
    return out;
}

std::vector<double> DailySeries::values() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.value);
    return out;
}

ParseReport parse_billing(std::istream& source, ParseMode mode) {
    ParseReport report;
    std::string line;
    size_t line_no = 0;
    bool header_seen = false;

    auto fail = [&](const std::string& reason) {
        std::string msg = "line " + std::to_string(line_no) + ": " + reason;
        if (mode == ParseMode::Strict) {
            throw std::runtime_error("billing CSV parse error, " + msg);
        }
        ++report.rows_skipped;
        report.row_errors.push_back(msg);
    };

    while (std::getline(source, line)) {
        ++line_no;
        line = strip_cr(line);
        if (!header_seen) {
            header_seen = true;
            if (line != "client_id,period_start,period_end,consumption") {
                throw std::runtime_error("billing CSV: unexpected header '" + line + "'");
            }
            continue;
        }
        if (line.empty()) continue;

        auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            fail("expected 4 fields, got " + std::to_string(fields.size()));
            continue;
        }
        auto start = Date::parse(fields[1]);
        auto end = Date::parse(fields[2]);
        if (!start || !end) {
            fail("malformed date");
            continue;
        }
        auto consumption = parse_double(fields[3]);
        if (!consumption || !std::isfinite(*consumption)) {
            fail("malformed consumption value");
            continue;
        }
        if (*consumption < 0.0) {
            fail("negative consumption");
            continue;
        }
        if (*end < *start) {
            fail("inverted period");
            continue;
        }
        report.records.push_back({fields[0], *start, *end, *consumption});
    }
    return report;
}

DailySeries estimate_daily(const std::vector<BillingRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("estimate_daily: no billing records");
    }
    // Per-record division first, then per-date accumulation in record order.
    std::map<long, double> totals;
    for (const auto& rec : records) {
        double per_day = rec.consumption / static_cast<double>(rec.period_days());
        for (long d = rec.period_start.days_since_epoch();
             d <= rec.period_end.days_since_epoch(); ++d) {
            totals[d] += per_day;
        }
    }
    std::vector<DailyPoint> points;
    points.reserve(totals.size());
    for (const auto& [day, value] : totals) {
        points.push_back({Date(day), value});
    }
    return DailySeries::from_points(std::move(points));
}

std::vector<GapRange> detect_gaps(const DailySeries& series) {
    if (series.empty()) {
        throw std::invalid_argument("detect_gaps: empty series");
    }
    std::vector<GapRange> gaps;
    const auto& pts = series.points();
    for (size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].date - pts[i - 1].date > 1) {
            gaps.push_back({pts[i - 1].date + 1, pts[i].date - 1});
        }
    }
    return gaps;
}

void write_daily_csv(const DailySeries& series, std::ostream& out) {
    out << "date,consumption_m3\n";
    for (const auto& p : series.points()) {
        out << p.date.to_string() << ',' << format_double(p.value) << '\n';
    }
}

DailySeries read_daily_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "date,consumption_m3") {
        throw std::runtime_error("daily series CSV: missing or bad header");
    }
    std::vector<DailyPoint> points;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw std::runtime_error("daily series CSV: bad row at line " +
                                     std::to_string(line_no));
        }
        auto date = Date::parse(fields[0]);
        auto value = parse_double(fields[1]);
        if (!date || !value) {
            throw std::runtime_error("daily series CSV: bad row at line " +
                                     std::to_string(line_no));
        }
        points.push_back({*date, *value});
    }
    return DailySeries::from_points(std::move(points));
}

} // namespace aquacast
