#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aquacast/billing.hpp"
#include "support/helpers.hpp"

#include <cmath>
#include <sstream>

using namespace aquacast;
using namespace aquacast::testing;

TEST_CASE("parse_billing maps well-formed rows") {
    std::istringstream in(
        "client_id,period_start,period_end,consumption\n"
        "c1,2020-01-01,2020-01-30,30.0\n");
    auto report = parse_billing(in, ParseMode::Strict);
    REQUIRE(report.records.size() == 1);
    const auto& r = report.records[0];
    CHECK(r.client_id == "c1");
    CHECK(r.period_start == Date(2020, 1, 1));
    CHECK(r.period_end == Date(2020, 1, 30));
    CHECK(r.consumption == 30.0);
    CHECK(r.period_days() == 30);
}

TEST_CASE("parse_billing rejects inverted periods") {
    std::istringstream strict(
        "client_id,period_start,period_end,consumption\n"
        "c1,2020-01-30,2020-01-01,30.0\n");
    CHECK_THROWS_WITH_AS(parse_billing(strict, ParseMode::Strict),
                         doctest::Contains("inverted period"), std::runtime_error);

    std::istringstream lenient(
        "client_id,period_start,period_end,consumption\n"
        "c1,2020-01-30,2020-01-01,30.0\n"
        "c2,2020-01-01,2020-01-02,4.0\n");
    auto report = parse_billing(lenient, ParseMode::Lenient);
    CHECK(report.records.size() == 1);
    CHECK(report.rows_skipped == 1);
    REQUIRE(report.row_errors.size() == 1);
    CHECK(report.row_errors[0].find("line 2") != std::string::npos);
}

TEST_CASE("parse_billing rejects bad dates and negative consumption") {
    std::istringstream in(
        "client_id,period_start,period_end,consumption\n"
        "c1,2020-02-30,2020-03-01,5.0\n"
        "c2,2020-01-01,2020-01-02,-3.0\n"
        "c3,not-a-date,2020-01-02,1.0\n");
    auto report = parse_billing(in, ParseMode::Lenient);
    CHECK(report.records.empty());
    CHECK(report.rows_skipped == 3);
}

TEST_CASE("parse_billing header-only stream yields empty list") {
    std::istringstream in("client_id,period_start,period_end,consumption\n");
    auto report = parse_billing(in, ParseMode::Strict);
    CHECK(report.records.empty());
}

TEST_CASE("estimate_daily splits uniformly over the period") {
    std::vector<BillingRecord> records{
        {"c1", Date(2020, 1, 1), Date(2020, 1, 30), 30.0}};
    auto series = estimate_daily(records);
    REQUIRE(series.size() == 30);
    for (const auto& p : series.points()) {
        CHECK(p.value == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("estimate_daily uses the inclusive day count") {
    std::vector<BillingRecord> records{
        {"c1", Date(2020, 1, 1), Date(2020, 1, 2), 3.0}};
    auto series = estimate_daily(records);
    REQUIRE(series.size() == 2);
    CHECK(series[0].value == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(series[1].value == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("estimate_daily sums overlapping records per date") {
    std::vector<BillingRecord> records{
        {"a", Date(2020, 1, 1), Date(2020, 1, 2), 2.0},
        {"b", Date(2020, 1, 2), Date(2020, 1, 5), 4.0}};
    auto series = estimate_daily(records);
    auto oracle = brute_force_daily(records);
    REQUIRE(series.size() == oracle.size());
    for (size_t i = 0; i < oracle.size(); ++i) {
        CHECK(series[i].date == oracle[i].date);
        CHECK(series[i].value == oracle[i].value);
    }
    CHECK(series[0].value == doctest::Approx(1.0));
    CHECK(series[1].value == doctest::Approx(2.0));
    CHECK(series[2].value == doctest::Approx(1.0));
    CHECK(series[4].value == doctest::Approx(1.0));
}

TEST_CASE("estimate_daily rejects empty input") {
    CHECK_THROWS_AS(estimate_daily({}), std::invalid_argument);
}

TEST_CASE("conservation: contributions re-sum to recorded consumption") {
    auto records = random_billing_records(200, 7);
    for (const auto& r : records) {
        double per_day = r.consumption / static_cast<double>(r.period_days());
        double total = 0.0;
        for (long d = 0; d < r.period_days(); ++d) total += per_day;
        double rel = r.consumption > 0
                         ? std::abs(total - r.consumption) / r.consumption
                         : std::abs(total);
        CHECK(rel <= 1e-9);
    }
}

TEST_CASE("superposition: estimates of a union are pointwise sums") {
    auto a = random_billing_records(60, 11);
    auto b = random_billing_records(60, 12);
    std::vector<BillingRecord> both = a;
    both.insert(both.end(), b.begin(), b.end());

    auto sa = estimate_daily(a);
    auto sb = estimate_daily(b);
    auto sc = estimate_daily(both);

    for (const auto& p : sc.points()) {
        double expected = 0.0;
        for (const auto& q : sa.points()) {
            if (q.date == p.date) expected += q.value;
        }
        for (const auto& q : sb.points()) {
            if (q.date == p.date) expected += q.value;
        }
        CHECK(p.value == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("detect_gaps on contiguous series") {
    auto series = make_series(Date(2020, 1, 1), std::vector<double>(10, 1.0));
    CHECK(detect_gaps(series).empty());
}

TEST_CASE("detect_gaps finds the forced range") {
    std::vector<Date> dates;
    for (int d = 1; d <= 3; ++d) dates.push_back(Date(2020, 1, static_cast<unsigned>(d)));
    for (int d = 7; d <= 10; ++d) dates.push_back(Date(2020, 1, static_cast<unsigned>(d)));
    auto series = make_series(dates, std::vector<double>(dates.size(), 1.0));
    auto gaps = detect_gaps(series);
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0] == GapRange{Date(2020, 1, 4), Date(2020, 1, 6)});
}

TEST_CASE("detect_gaps recovers the documented missing ranges") {
    const GapRange g2014{Date(2014, 3, 1), Date(2014, 9, 30)};
    const GapRange g2017{Date(2017, 3, 25), Date(2017, 5, 31)};
    std::vector<DailyPoint> points;
    for (Date d = Date(2009, 7, 7); d <= Date(2020, 9, 2); ++d) {
        bool gap = (d >= g2014.start && d <= g2014.end) ||
                   (d >= g2017.start && d <= g2017.end);
        if (!gap) points.push_back({d, 1.0});
    }
    auto series = DailySeries::from_points(std::move(points));
    auto gaps = detect_gaps(series);
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0] == g2014);
    CHECK(gaps[1] == g2017);
}

TEST_CASE("gaps of contiguous single-client records are empty") {
    std::vector<BillingRecord> records;
    Date start(2020, 1, 1);
    for (int i = 0; i < 12; ++i) {
        records.push_back({"c1", start + i * 30, start + (i + 1) * 30 - 1, 25.0});
    }
    CHECK(detect_gaps(estimate_daily(records)).empty());
}

TEST_CASE("daily series CSV round trips") {
    auto series = make_series(Date(2020, 2, 28), {1.25, 3.75, 0.125});
    std::stringstream buf;
    write_daily_csv(series, buf);
    auto back = read_daily_csv(buf);
    REQUIRE(back.size() == series.size());
    for (size_t i = 0; i < series.size(); ++i) {
        CHECK(back[i].date == series[i].date);
        CHECK(back[i].value == series[i].value);
    }
}

TEST_CASE("DailySeries invariants") {
    CHECK_THROWS_AS(
        DailySeries::from_points({{Date(2020, 1, 2), 1.0}, {Date(2020, 1, 1), 1.0}}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        DailySeries::from_points({{Date(2020, 1, 1), 1.0}, {Date(2020, 1, 1), 2.0}}),
        std::invalid_argument);
    CHECK_THROWS_AS(DailySeries::from_points({{Date(2020, 1, 1), -0.5}}),
                    std::invalid_argument);
}
