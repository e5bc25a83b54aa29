#ifndef AQUACAST_EVALUATION_HPP
#define AQUACAST_EVALUATION_HPP

#include "aquacast/baseline.hpp"
#include "aquacast/billing.hpp"
#include "aquacast/calendar.hpp"
#include "aquacast/forecaster.hpp"

#include <functional>
#include <span>
#include <vector>

namespace aquacast {

struct MetricSet {
    double mae = 0.0;  // cubic metres
    double mape = 0.0; // percent
    double mse = 0.0;  // m^6
    double rmse = 0.0; // cubic metres
};

MetricSet compute_metrics(std::span<const double> actual,
                          std::span<const double> predicted);

/// One rolling-origin fold over record indices [train_begin, train_end)
/// and [test_begin, test_end); test immediately follows train.
struct FoldSpec {
    size_t fold_index = 0;
    size_t train_begin = 0;
    size_t train_end = 0; // exclusive
    size_t test_begin = 0;
    size_t test_end = 0; // exclusive
};

/**
 * Split the observed records into n_quantiles contiguous blocks of size
 * floor(N / n_quantiles), remainder assigned to the earliest block. Fold
 * k tests on the (k+1)-th most recent block and trains on everything
 * before it.
 */
std::vector<FoldSpec> make_folds(const DailySeries& series, size_t n_quantiles,
                                 size_t n_folds);

struct CVReport {
    std::vector<MetricSet> folds;
    MetricSet mean;
    MetricSet stddev; // population standard deviation across folds
};

/**
 * Model runner: fit on the training slice, return a prediction for each
 * test date (in order). Lets tests inject oracle models and lets the CV
 * loop stay model-agnostic.
 */
using ModelRunner = std::function<std::vector<double>(
    const DailySeries& train, const std::vector<Date>& test_dates)>;

ModelRunner forecaster_runner(const ForecasterConfig& config,
                              const HolidayTable& holidays);
ModelRunner baseline_runner(const LagModelConfig& config);

/// Rolling-origin cross-validation. Any fold failure rethrows with the
/// fold index. `jobs` > 1 runs folds concurrently; output order is fixed.
CVReport run_cv(const DailySeries& series, const ModelRunner& runner,
                size_t n_quantiles, size_t n_folds, int jobs = 1);

} // namespace aquacast

#endif
