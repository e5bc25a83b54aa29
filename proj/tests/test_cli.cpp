#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aquacast/billing.hpp"
#include "support/synthetic.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace aquacast;
using namespace aquacast::testing;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string command = std::string(AQUACAST_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
    int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("aquacast_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static inline int counter = 0;
};

void write_synthetic_csv(const fs::path& to, int n_days) {
    SyntheticConfig sc;
    sc.n_days = n_days;
    auto data = generate_synthetic(sc);
    std::ofstream out(to);
    write_daily_csv(data.series, out);
}

} // namespace

TEST_CASE("ingest produces daily estimates and a gap report") {
    TempDir tmp;
    auto billing = tmp.path / "billing.csv";
    {
        std::ofstream out(billing);
        out << "client_id,period_start,period_end,consumption\n";
        // Two contiguous billing periods, then a gap, then one more.
        out << "c1,2020-01-01,2020-01-10,20.0\n";
        out << "c1,2020-01-11,2020-01-20,30.0\n";
        out << "c1,2020-02-01,2020-02-10,10.0\n";
    }
    auto daily = tmp.path / "daily.csv";
    REQUIRE(run_cli("ingest --billing " + billing.string() + " --out " +
                    daily.string()) == 0);

    std::ifstream in(daily);
    auto series = read_daily_csv(in);
    CHECK(series.size() == 30);
    CHECK(series[0].value == doctest::Approx(2.0));

    auto gaps = read_file(tmp.path / "daily.csv.gaps.csv");
    CHECK(gaps ==
          "gap_start,gap_end\n"
          "2020-01-21,2020-01-31\n");
}

TEST_CASE("ingest strict mode fails on malformed rows") {
    TempDir tmp;
    auto billing = tmp.path / "billing.csv";
    {
        std::ofstream out(billing);
        out << "client_id,period_start,period_end,consumption\n";
        out << "c1,2020-01-10,2020-01-01,5.0\n";
    }
    auto daily = tmp.path / "daily.csv";
    CHECK(run_cli("ingest --strict --billing " + billing.string() + " --out " +
                  daily.string()) != 0);
}

TEST_CASE("fit, forecast and decompose round trip through files") {
    TempDir tmp;
    auto daily = tmp.path / "daily.csv";
    write_synthetic_csv(daily, 500);

    auto model = tmp.path / "model.json";
    REQUIRE(run_cli("fit --data " + daily.string() + " --out " + model.string() +
                    " --n-changepoints 5 --yearly-order 3 --weekly-order 2") == 0);
    CHECK(fs::exists(model));

    auto fc = tmp.path / "forecast.csv";
    REQUIRE(run_cli("forecast --model " + model.string() + " --out " + fc.string() +
                    " --horizon-days 30 --n-interval-samples 50") == 0);
    std::string text = read_file(fc);
    CHECK(text.rfind("date,yhat,yhat_lower,yhat_upper,trend,yearly,weekly,holidays",
                     0) == 0);
    // Header plus one row per horizon day.
    CHECK(std::count(text.begin(), text.end(), '\n') == 31);

    auto comp = tmp.path / "components.csv";
    REQUIRE(run_cli("decompose --model " + model.string() + " --out " +
                    comp.string()) == 0);
    std::string comp_text = read_file(comp);
    CHECK(comp_text.rfind("component,x,value", 0) == 0);
    CHECK(comp_text.find("\ntrend,") != std::string::npos);
    CHECK(comp_text.find("\nyearly,") != std::string::npos);
    CHECK(comp_text.find("\nweekly,") != std::string::npos);
}

TEST_CASE("baseline fit and forecast") {
    TempDir tmp;
    auto daily = tmp.path / "daily.csv";
    write_synthetic_csv(daily, 400);

    auto model = tmp.path / "baseline.json";
    REQUIRE(run_cli("fit --model baseline --data " + daily.string() + " --out " +
                    model.string() + " --input-sequence-length 30") == 0);
    auto fc = tmp.path / "forecast.csv";
    REQUIRE(run_cli("forecast --model " + model.string() + " --out " + fc.string() +
                    " --horizon-days 14") == 0);
    std::string text = read_file(fc);
    CHECK(std::count(text.begin(), text.end(), '\n') == 15);
}

TEST_CASE("cv writes per-fold rows plus aggregates") {
    TempDir tmp;
    auto daily = tmp.path / "daily.csv";
    write_synthetic_csv(daily, 400);

    auto report = tmp.path / "cv.csv";
    REQUIRE(run_cli("cv --model baseline --data " + daily.string() + " --out " +
                    report.string() +
                    " --input-sequence-length 30 --n-quantiles 6 --n-folds 2") == 0);
    std::string text = read_file(report);
    CHECK(text.rfind("fold,mae,mape,mse,rmse", 0) == 0);
    CHECK(text.find("\nmean,") != std::string::npos);
    CHECK(text.find("\nstd,") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("tune emits history, pdp and best-config artifacts") {
    TempDir tmp;
    auto daily = tmp.path / "daily.csv";
    write_synthetic_csv(daily, 400);

    auto space = tmp.path / "space.json";
    {
        std::ofstream out(space);
        out << R"([
  {"name": "input_sequence_length", "type": "uniform_int", "low": 5, "high": 60},
  {"name": "ridge_epsilon", "type": "log_uniform", "low": 1e-9, "high": 1e-3}
])";
    }
    std::string prefix = (tmp.path / "search").string();
    REQUIRE(run_cli("tune --model baseline --data " + daily.string() + " --space " +
                    space.string() + " --out-prefix " + prefix +
                    " --iterations 8 --n-quantiles 6 --n-folds 2") == 0);

    std::string history = read_file(prefix + "_history.csv");
    CHECK(history.rfind("iteration,input_sequence_length,ridge_epsilon,"
                        "mape_mean,mape_std,mae_mean,status,seconds",
                        0) == 0);
    CHECK(std::count(history.begin(), history.end(), '\n') == 9);
    // Default run is timing-free so re-runs stay byte-identical.
    CHECK(history.find(",ok,0\n") != std::string::npos);

    std::string pdp = read_file(prefix + "_pdp.csv");
    CHECK(pdp.rfind("dim1,dim2,x1,x2,value", 0) == 0);
    CHECK(pdp.find("input_sequence_length,ridge_epsilon,") != std::string::npos);

    std::string best = read_file(prefix + "_best.json");
    CHECK(best.find("input_sequence_length") != std::string::npos);
}

TEST_CASE("missing input files exit with an error") {
    TempDir tmp;
    CHECK(run_cli("fit --data " + (tmp.path / "nope.csv").string() + " --out " +
                  (tmp.path / "model.json").string()) != 0);
    CHECK(run_cli("forecast --model " + (tmp.path / "nope.json").string() +
                  " --out " + (tmp.path / "fc.csv").string() +
                  " --horizon-days 5") != 0);
}

TEST_CASE("repeated fit runs are byte-identical") {
    TempDir tmp;
    auto daily = tmp.path / "daily.csv";
    write_synthetic_csv(daily, 400);
    auto m1 = tmp.path / "m1.json";
    auto m2 = tmp.path / "m2.json";
    std::string flags = " --n-changepoints 5 --yearly-order 2 --weekly-order 2";
    REQUIRE(run_cli("--seed 7 fit --data " + daily.string() + " --out " +
                    m1.string() + flags) == 0);
    REQUIRE(run_cli("--seed 7 fit --data " + daily.string() + " --out " +
                    m2.string() + flags) == 0);
    CHECK(read_file(m1) == read_file(m2));
}
