#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aquacast/calendar.hpp"

#include <sstream>

using namespace aquacast;

TEST_CASE("load_holidays shares one name across years") {
    std::istringstream in(
        "date,name\n"
        "2019-12-25,Christmas Day\n"
        "2020-12-25,Christmas Day\n");
    auto table = load_holidays(in);
    CHECK(table.names() == std::vector<std::string>{"Christmas Day"});
    CHECK(table.lookup(Date(2019, 12, 25)) == "Christmas Day");
    CHECK(table.lookup(Date(2020, 12, 25)) == "Christmas Day");
    CHECK(!table.lookup(Date(2020, 12, 26)));
}

TEST_CASE("load_holidays empty file gives empty table") {
    std::istringstream in("date,name\n");
    auto table = load_holidays(in);
    CHECK(table.empty());
    CHECK(table.names().empty());
}

TEST_CASE("load_holidays rejects duplicate dates") {
    std::istringstream in(
        "date,name\n"
        "2020-01-01,New Year's Day\n"
        "2020-01-01,Another Name\n");
    CHECK_THROWS_AS(load_holidays(in), std::runtime_error);
}

TEST_CASE("load_holidays rejects malformed rows") {
    std::istringstream bad_date("date,name\n2020-13-01,Nope\n");
    CHECK_THROWS_AS(load_holidays(bad_date), std::runtime_error);
    std::istringstream empty_name("date,name\n2020-01-01,\n");
    CHECK_THROWS_AS(load_holidays(empty_name), std::runtime_error);
}

TEST_CASE("lookup reproduces exactly the input rows") {
    std::istringstream in(
        "date,name\n"
        "2020-01-01,New Year's Day\n"
        "2020-07-01,Canada Day\n"
        "2020-12-25,Christmas Day\n");
    auto table = load_holidays(in);
    CHECK(table.entries().size() == 3);
    CHECK(table.lookup(Date(2020, 7, 1)) == "Canada Day");
    CHECK(table.names() ==
          std::vector<std::string>{"Canada Day", "Christmas Day", "New Year's Day"});
}

TEST_CASE("to_model_time endpoints and linearity") {
    TimeScale scale{Date(2019, 1, 1), 100};
    CHECK(scale.to_model_time(Date(2019, 1, 1)) == 0.0);
    CHECK(scale.to_model_time(Date(2019, 1, 1) + 100) == 1.0);
    CHECK(scale.to_model_time(Date(2019, 1, 1) + 50) == 0.5);
    // Forecast dates land past 1.
    CHECK(scale.to_model_time(Date(2019, 1, 1) + 150) == 1.5);
}

TEST_CASE("to_model_time is strictly increasing and affine") {
    TimeScale scale{Date(2020, 3, 1), 365};
    double prev = scale.to_model_time(Date(2020, 3, 1) - 10);
    double step = 0.0;
    for (long i = -9; i <= 400; ++i) {
        double t = scale.to_model_time(Date(2020, 3, 1) + i);
        CHECK(t > prev);
        if (step != 0.0) {
            CHECK(t - prev == doctest::Approx(step).epsilon(1e-12));
        }
        step = t - prev;
        prev = t;
    }
}
