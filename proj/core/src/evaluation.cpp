#include "aquacast/evaluation.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace aquacast {

MetricSet compute_metrics(std::span<const double> actual,
                          std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw std::invalid_argument("compute_metrics: length mismatch");
    }
    if (actual.empty()) {
        throw std::invalid_argument("compute_metrics: empty input");
    }
    double abs_sum = 0.0, pct_sum = 0.0, sq_sum = 0.0;
    for (size_t i = 0; i < actual.size(); ++i) {
        double err = actual[i] - predicted[i];
        abs_sum += std::abs(err);
        sq_sum += err * err;
        if (actual[i] == 0.0) {
            throw std::invalid_argument("compute_metrics: zero actual value, MAPE undefined");
        }
        pct_sum += std::abs(err) / std::abs(actual[i]);
    }
    const double n = static_cast<double>(actual.size());
    MetricSet m;
    m.mae = abs_sum / n;
    m.mape = 100.0 * pct_sum / n;
    m.mse = sq_sum / n;
    m.rmse = std::sqrt(m.mse);
    return m;
}

std::vector<FoldSpec> make_folds(const DailySeries& series, size_t n_quantiles,
                                 size_t n_folds) {
    if (n_quantiles < 2 || n_folds < 1 || n_folds >= n_quantiles) {
        throw std::invalid_argument("make_folds: require 1 <= n_folds < n_quantiles");
    }
    const size_t n = series.size();
    if (n < n_quantiles) {
        throw std::invalid_argument("make_folds: series shorter than n_quantiles");
    }
    const size_t base = n / n_quantiles;
    const size_t remainder = n - base * n_quantiles;

    // Block b covers [begin[b], begin[b+1]); the earliest block absorbs
    // the remainder so every test block has equal size.
    std::vector<size_t> begin(n_quantiles + 1);
    begin[0] = 0;
    for (size_t b = 0; b < n_quantiles; ++b) {
        begin[b + 1] = begin[b] + base + (b == 0 ? remainder : 0);
    }

    std::vector<FoldSpec> folds;
    folds.reserve(n_folds);
    for (size_t k = 0; k < n_folds; ++k) {
        size_t test_block = n_quantiles - 1 - k;
        FoldSpec spec;
        spec.fold_index = k;
        spec.test_begin = begin[test_block];
        spec.test_end = begin[test_block + 1];
        spec.train_begin = 0;
        spec.train_end = spec.test_begin;
        folds.push_back(spec);
    }
    return folds;
}

ModelRunner forecaster_runner(const ForecasterConfig& config,
                              const HolidayTable& holidays) {
    return [config, holidays](const DailySeries& train,
                              const std::vector<Date>& test_dates) {
        auto model = fit_forecaster(train, config, holidays);
        auto forecast = predict(model, test_dates);
        std::vector<double> out;
        out.reserve(forecast.rows.size());
        for (const auto& row : forecast.rows) out.push_back(row.yhat);
        return out;
    };
}

ModelRunner baseline_runner(const LagModelConfig& config) {
    return [config](const DailySeries& train, const std::vector<Date>& test_dates) {
        auto lag = build_lag_matrix(train, config.input_sequence_length);
        auto model = fit_ols(lag.rows, lag.targets, config);

        const size_t tx = static_cast<size_t>(config.input_sequence_length);
        const auto& pts = train.points();
        if (pts.size() < tx) {
            throw std::runtime_error("baseline: training set shorter than T_x");
        }
        std::vector<double> history;
        history.reserve(tx);
        for (size_t i = pts.size() - tx; i < pts.size(); ++i) {
            history.push_back(pts[i].value);
        }

        // Recursive day-by-day continuation from the end of training;
        // test dates pick their prediction off the daily path.
        Date origin = train.last_date();
        Date last_needed = origin;
        for (Date d : test_dates) last_needed = std::max(last_needed, d);
        int horizon = static_cast<int>(last_needed - origin);
        if (horizon < 1) {
            throw std::runtime_error("baseline: test dates must follow the training set");
        }
        auto path = forecast_recursive(model, std::move(history), horizon);

        std::vector<double> out;
        out.reserve(test_dates.size());
        for (Date d : test_dates) {
            long offset = d - origin;
            if (offset < 1) {
                throw std::runtime_error("baseline: test date inside training range");
            }
            out.push_back(path[static_cast<size_t>(offset - 1)]);
        }
        return out;
    };
}

namespace {

MetricSet run_fold(const DailySeries& series, const ModelRunner& runner,
                   const FoldSpec& fold) {
    const auto& pts = series.points();
    std::vector<DailyPoint> train_pts(pts.begin() + static_cast<long>(fold.train_begin),
                                      pts.begin() + static_cast<long>(fold.train_end));
    DailySeries train = DailySeries::from_points(std::move(train_pts));

    std::vector<Date> test_dates;
    std::vector<double> actual;
    for (size_t i = fold.test_begin; i < fold.test_end; ++i) {
        test_dates.push_back(pts[i].date);
        actual.push_back(pts[i].value);
    }
    auto predicted = runner(train, test_dates);
    if (predicted.size() != actual.size()) {
        throw std::runtime_error("model runner returned wrong prediction count");
    }
    return compute_metrics(actual, predicted);
}

} // namespace

CVReport run_cv(const DailySeries& series, const ModelRunner& runner,
                size_t n_quantiles, size_t n_folds, int jobs) {
    auto folds = make_folds(series, n_quantiles, n_folds);

    CVReport report;
    report.folds.resize(folds.size());

    auto execute = [&](size_t i) {
        try {
            report.folds[i] = run_fold(series, runner, folds[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error("fold " + std::to_string(i) + ": " + e.what());
        }
    };

    if (jobs > 1) {
        std::vector<std::future<void>> tasks;
        tasks.reserve(folds.size());
        for (size_t i = 0; i < folds.size(); ++i) {
            tasks.push_back(std::async(std::launch::async, execute, i));
        }
        for (auto& t : tasks) t.get();
    } else {
        for (size_t i = 0; i < folds.size(); ++i) execute(i);
    }

    auto accumulate = [&](auto member) {
        double sum = 0.0;
        for (const auto& f : report.folds) sum += f.*member;
        double mean = sum / static_cast<double>(report.folds.size());
        double var = 0.0;
        for (const auto& f : report.folds) {
            double d = f.*member - mean;
            var += d * d;
        }
        var /= static_cast<double>(report.folds.size());
        return std::pair<double, double>(mean, std::sqrt(var));
    };
    std::tie(report.mean.mae, report.stddev.mae) = accumulate(&MetricSet::mae);
    std::tie(report.mean.mape, report.stddev.mape) = accumulate(&MetricSet::mape);
    std::tie(report.mean.mse, report.stddev.mse) = accumulate(&MetricSet::mse);
    std::tie(report.mean.rmse, report.stddev.rmse) = accumulate(&MetricSet::rmse);
    return report;
}

} // namespace aquacast
