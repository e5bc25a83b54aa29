#include "aquacast/baseline.hpp"
#include "aquacast/evaluation.hpp"
#include "aquacast/forecaster.hpp"
#include "support/helpers.hpp"
#include "support/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace aquacast;
using namespace aquacast::testing;

namespace {

void BM_EstimateDaily(benchmark::State& state) {
    auto records = random_billing_records(static_cast<size_t>(state.range(0)), 1);
    for (auto _ : state) {
        auto series = estimate_daily(records);
        benchmark::DoNotOptimize(series);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateDaily)->Arg(1000)->Arg(10000);

void BM_FitForecaster(benchmark::State& state) {
    SyntheticConfig sc;
    sc.n_days = static_cast<int>(state.range(0));
    auto data = generate_synthetic(sc);
    ForecasterConfig config;
    config.n_changepoints = 25;
    config.yearly_order = 10;
    config.weekly_order = 3;
    for (auto _ : state) {
        auto model = fit_forecaster(data.series, config, data.holidays);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_FitForecaster)->Arg(1200)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_PredictWithIntervals(benchmark::State& state) {
    SyntheticConfig sc;
    sc.n_days = 1200;
    auto data = generate_synthetic(sc);
    ForecasterConfig config;
    config.n_changepoints = 10;
    config.yearly_order = 3;
    config.weekly_order = 2;
    auto model = fit_forecaster(data.series, config, data.holidays);
    std::vector<Date> dates;
    for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
        dates.push_back(sc.start + sc.n_days + i);
    }
    for (auto _ : state) {
        auto fc = predict_with_intervals(model, dates, config);
        benchmark::DoNotOptimize(fc);
    }
}
BENCHMARK(BM_PredictWithIntervals)->Arg(365)->Arg(1461)->Unit(benchmark::kMillisecond);

void BM_BaselineCv(benchmark::State& state) {
    SyntheticConfig sc;
    sc.n_days = 1200;
    auto data = generate_synthetic(sc);
    for (auto _ : state) {
        auto report = run_cv(data.series, baseline_runner({300, 1e-8}), 6, 4);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_BaselineCv)->Unit(benchmark::kMillisecond);

void BM_ComputeMetrics(benchmark::State& state) {
    std::vector<double> a(10000, 2.0), p(10000, 2.5);
    for (auto _ : state) {
        auto m = compute_metrics(a, p);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_ComputeMetrics);

} // namespace

BENCHMARK_MAIN();
