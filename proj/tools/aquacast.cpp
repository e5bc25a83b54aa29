#include "aquacast/billing.hpp"
#include "aquacast/calendar.hpp"
#include "aquacast/evaluation.hpp"
#include "aquacast/serialize.hpp"
#include "aquacast/tuner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace aquacast;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    return out;
}

HolidayTable load_holiday_file(const std::string& path) {
    if (path.empty()) return {};
    auto in = open_input(path);
    return load_holidays(in);
}

struct ForecasterFlags {
    ForecasterConfig config;
    std::string config_path;
    std::string mode = "additive";

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "Forecaster config JSON (flags override its values)");
        cmd->add_option("--changepoint-prior-scale", config.changepoint_prior_scale);
        cmd->add_option("--seasonality-prior-scale", config.seasonality_prior_scale);
        cmd->add_option("--holiday-prior-scale", config.holiday_prior_scale);
        cmd->add_option("--seasonality-mode", mode)
            ->check(CLI::IsMember({"additive", "multiplicative"}));
        cmd->add_option("--n-changepoints", config.n_changepoints);
        cmd->add_option("--changepoint-range", config.changepoint_range);
        cmd->add_option("--yearly-order", config.yearly_order);
        cmd->add_option("--weekly-order", config.weekly_order);
        cmd->add_option("--interval-width", config.interval_width);
        cmd->add_option("--n-interval-samples", config.n_interval_samples);
    }

    ForecasterConfig resolve(const CLI::App* cmd, std::uint64_t seed) const {
        ForecasterConfig out = config;
        if (!config_path.empty()) {
            auto in = open_input(config_path);
            ForecasterConfig from_file = forecaster_config_from_json(in);
            // Flags the user actually passed win over the file.
            auto keep = [&](const std::string& flag) {
                return cmd->count(flag) > 0;
            };
            ForecasterConfig merged = from_file;
            if (keep("--changepoint-prior-scale"))
                merged.changepoint_prior_scale = out.changepoint_prior_scale;
            if (keep("--seasonality-prior-scale"))
                merged.seasonality_prior_scale = out.seasonality_prior_scale;
            if (keep("--holiday-prior-scale"))
                merged.holiday_prior_scale = out.holiday_prior_scale;
            if (keep("--seasonality-mode"))
                merged.seasonality_mode = seasonality_mode_from_string(mode);
            if (keep("--n-changepoints")) merged.n_changepoints = out.n_changepoints;
            if (keep("--changepoint-range"))
                merged.changepoint_range = out.changepoint_range;
            if (keep("--yearly-order")) merged.yearly_order = out.yearly_order;
            if (keep("--weekly-order")) merged.weekly_order = out.weekly_order;
            if (keep("--interval-width")) merged.interval_width = out.interval_width;
            if (keep("--n-interval-samples"))
                merged.n_interval_samples = out.n_interval_samples;
            out = merged;
        } else {
            out.seasonality_mode = seasonality_mode_from_string(mode);
        }
        out.rng_seed = seed;
        out.validate();
        return out;
    }
};

ForecasterConfig config_from_assignment(const SearchSpace& space,
                                        const Assignment& assignment,
                                        std::uint64_t seed) {
    ForecasterConfig config;
    config.rng_seed = seed;
    for (size_t i = 0; i < space.dims.size(); ++i) {
        const auto& name = space.dims[i].name;
        const auto& value = assignment[i];
        auto as_double = [&]() {
            return std::holds_alternative<double>(value)
                       ? std::get<double>(value)
                       : static_cast<double>(std::get<long>(value));
        };
        auto as_int = [&]() {
            return std::holds_alternative<long>(value)
                       ? static_cast<int>(std::get<long>(value))
                       : static_cast<int>(std::get<double>(value));
        };
        if (name == "changepoint_prior_scale") config.changepoint_prior_scale = as_double();
        else if (name == "seasonality_prior_scale") config.seasonality_prior_scale = as_double();
        else if (name == "holiday_prior_scale") config.holiday_prior_scale = as_double();
        else if (name == "seasonality_mode")
            config.seasonality_mode =
                seasonality_mode_from_string(std::get<std::string>(value));
        else if (name == "n_changepoints") config.n_changepoints = as_int();
        else if (name == "changepoint_range") config.changepoint_range = as_double();
        else if (name == "yearly_order") config.yearly_order = as_int();
        else if (name == "weekly_order") config.weekly_order = as_int();
        else throw std::runtime_error("space dimension '" + name +
                                      "' does not map to a forecaster hyperparameter");
    }
    return config;
}

LagModelConfig lag_config_from_assignment(const SearchSpace& space,
                                          const Assignment& assignment) {
    LagModelConfig config;
    for (size_t i = 0; i < space.dims.size(); ++i) {
        const auto& name = space.dims[i].name;
        if (name == "input_sequence_length") {
            config.input_sequence_length =
                static_cast<int>(std::get<long>(assignment[i]));
        } else if (name == "ridge_epsilon") {
            config.ridge_epsilon = std::get<double>(assignment[i]);
        } else {
            throw std::runtime_error("space dimension '" + name +
                                     "' does not map to a lag-model hyperparameter");
        }
    }
    return config;
}

int cmd_ingest(const std::string& billing_path, const std::string& out_path,
               const std::string& gaps_path, bool strict) {
    auto in = open_input(billing_path);
    auto report = parse_billing(in, strict ? ParseMode::Strict : ParseMode::Lenient);
    for (const auto& err : report.row_errors) {
        std::cerr << "skipped " << err << '\n';
    }
    auto series = estimate_daily(report.records);
    auto gaps = detect_gaps(series);

    {
        auto out = open_output(out_path);
        write_daily_csv(series, out);
    }
    {
        auto out = open_output(gaps_path);
        write_gap_report_csv(gaps, out);
    }
    std::cout << "wrote " << series.size() << " daily estimates to " << out_path << '\n';
    for (const auto& gap : gaps) {
        std::cout << "gap: " << gap.start.to_string() << " to " << gap.end.to_string()
                  << '\n';
    }
    return 0;
}

int cmd_fit(const std::string& data_path, const std::string& out_path,
            const std::string& model_kind, const ForecasterFlags& flags,
            const CLI::App* cmd, const std::string& holidays_path,
            const LagModelConfig& lag_config, std::uint64_t seed) {
    auto in = open_input(data_path);
    auto series = read_daily_csv(in);
    auto out = open_output(out_path);
    if (model_kind == "forecaster") {
        auto config = flags.resolve(cmd, seed);
        auto holidays = load_holiday_file(holidays_path);
        auto model = fit_forecaster(series, config, holidays);
        save_forecaster(model, out);
    } else {
        lag_config.validate();
        auto lag = build_lag_matrix(series, lag_config.input_sequence_length);
        auto model = fit_ols(lag.rows, lag.targets, lag_config);
        SavedLagModel saved;
        saved.model = std::move(model);
        saved.config = lag_config;
        saved.last_train_date = series.last_date();
        const auto& pts = series.points();
        size_t tx = static_cast<size_t>(lag_config.input_sequence_length);
        for (size_t i = pts.size() - tx; i < pts.size(); ++i) {
            saved.tail_window.push_back(pts[i].value);
        }
        save_lag_model(saved, out);
    }
    std::cout << "wrote model to " << out_path << '\n';
    return 0;
}

int cmd_forecast(const std::string& model_path, const std::string& out_path,
                 int horizon_days, std::uint64_t seed, double interval_width,
                 int n_samples, bool width_given, bool samples_given) {
    std::string kind;
    {
        auto probe = open_input(model_path);
        kind = model_file_type(probe);
    }
    Forecast forecast;
    if (kind == "forecaster") {
        auto in = open_input(model_path);
        auto model = load_forecaster(in);
        Date start = model.scale.epoch + model.scale.span_days + 1;
        std::vector<Date> dates;
        for (int i = 0; i < horizon_days; ++i) dates.push_back(start + i);
        ForecasterConfig interval_config = model.config;
        interval_config.rng_seed = seed;
        if (width_given) interval_config.interval_width = interval_width;
        if (samples_given) interval_config.n_interval_samples = n_samples;
        interval_config.validate();
        forecast = predict_with_intervals(model, dates, interval_config);
    } else if (kind == "ols_lag") {
        auto in = open_input(model_path);
        auto saved = load_lag_model(in);
        auto path = forecast_recursive(saved.model, saved.tail_window, horizon_days);
        for (int i = 0; i < horizon_days; ++i) {
            ForecastRow row;
            row.date = saved.last_train_date + (i + 1);
            row.yhat = row.yhat_lower = row.yhat_upper = row.trend =
                path[static_cast<size_t>(i)];
            forecast.rows.push_back(row);
        }
    } else {
        throw std::runtime_error("unknown model_type '" + kind + "'");
    }
    auto out = open_output(out_path);
    write_forecast_csv(forecast, out);
    std::cout << "wrote " << forecast.rows.size() << " forecast rows to " << out_path
              << '\n';
    return 0;
}

int cmd_decompose(const std::string& model_path, const std::string& out_path) {
    auto in = open_input(model_path);
    auto model = load_forecaster(in);
    std::vector<Date> dates;
    for (long i = 0; i <= model.scale.span_days; ++i) {
        dates.push_back(model.scale.epoch + i);
    }
    auto curves = decompose(model, dates);
    auto out = open_output(out_path);
    write_components_csv(curves, out);
    std::cout << "wrote components to " << out_path << '\n';
    return 0;
}

int cmd_cv(const std::string& data_path, const std::string& model_kind,
           size_t n_quantiles, size_t n_folds, const std::string& out_path,
           const ForecasterFlags& flags, const CLI::App* cmd,
           const std::string& holidays_path, const LagModelConfig& lag_config,
           std::uint64_t seed, int jobs) {
    auto in = open_input(data_path);
    auto series = read_daily_csv(in);
    ModelRunner runner;
    if (model_kind == "forecaster") {
        runner = forecaster_runner(flags.resolve(cmd, seed),
                                   load_holiday_file(holidays_path));
    } else {
        lag_config.validate();
        runner = baseline_runner(lag_config);
    }
    auto report = run_cv(series, runner, n_quantiles, n_folds, jobs);
    auto out = open_output(out_path);
    write_cv_report_csv(report, out);
    std::cout << "cv mean mape: " << report.mean.mape << "%\n";
    return 0;
}

int cmd_tune(const std::string& data_path, const std::string& space_path,
             int iterations, std::uint64_t seed, const std::string& out_prefix,
             const std::string& model_kind, size_t n_quantiles, size_t n_folds,
             const std::string& holidays_path, int jobs, bool timing) {
    auto data_in = open_input(data_path);
    auto series = read_daily_csv(data_in);
    auto space_in = open_input(space_path);
    auto space = load_search_space(space_in);
    auto holidays = load_holiday_file(holidays_path);

    std::vector<double> trial_seconds;
    TrialObjective objective = [&](const Assignment& assignment) {
        auto started = std::chrono::steady_clock::now();
        TrialOutcome outcome;
        try {
            ModelRunner runner;
            if (model_kind == "forecaster") {
                runner = forecaster_runner(
                    config_from_assignment(space, assignment, seed), holidays);
            } else {
                runner = baseline_runner(lag_config_from_assignment(space, assignment));
            }
            auto report = run_cv(series, runner, n_quantiles, n_folds, jobs);
            outcome.ok = true;
            outcome.mape_mean = report.mean.mape;
            outcome.mape_std = report.stddev.mape;
            outcome.mae_mean = report.mean.mae;
        } catch (const std::exception& e) {
            std::cerr << "trial failed: " << e.what() << '\n';
            outcome.ok = false;
        }
        std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - started;
        trial_seconds.push_back(elapsed.count());
        return outcome;
    };

    auto result = run_search(objective, space, iterations, seed);
    // Wall time is real measurement only on request; the default keeps
    // re-runs byte-identical.
    for (size_t i = 0; i < result.history.size(); ++i) {
        result.history[i].seconds = timing ? trial_seconds[i] : 0.0;
    }

    {
        auto out = open_output(out_prefix + "_history.csv");
        write_history_csv(space, result.history, out);
    }
    {
        std::vector<PdpGrid> grids;
        auto surrogate = fit_surrogate(space, result.history, seed);
        for (const auto& dim : space.dims) {
            grids.push_back(partial_dependence(surrogate, space, {dim.name}, 40, 250,
                                               seed));
        }
        for (size_t i = 0; i < space.dims.size(); ++i) {
            for (size_t j = i + 1; j < space.dims.size(); ++j) {
                grids.push_back(partial_dependence(
                    surrogate, space, {space.dims[i].name, space.dims[j].name}, 40,
                    250, seed));
            }
        }
        auto out = open_output(out_prefix + "_pdp.csv");
        write_pdp_csv(grids, out);
    }
    {
        auto out = open_output(out_prefix + "_best.json");
        if (model_kind == "forecaster") {
            forecaster_config_to_json(config_from_assignment(space, result.best, seed),
                                      out);
        } else {
            auto config = lag_config_from_assignment(space, result.best);
            out << "{\n  \"model_type\": \"ols_lag\",\n  \"input_sequence_length\": "
                << config.input_sequence_length << ",\n  \"ridge_epsilon\": "
                << config.ridge_epsilon << "\n}\n";
        }
    }
    std::cout << "best mape: " << result.best_objective << "%\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Utility demand forecasting toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    int jobs = 1;
    std::string holidays_path;
    app.add_option("--seed", seed, "Seed for all randomized steps")->capture_default_str();
    app.add_option("--jobs", jobs, "Parallel workers for CV folds");
    app.add_option("--holidays", holidays_path, "Holiday CSV (date,name)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Billing CSV to daily series CSV");
    std::string billing_path, ingest_out, gaps_out;
    bool strict = false;
    ingest->add_option("--billing", billing_path)->required();
    ingest->add_option("--out", ingest_out)->required();
    ingest->add_option("--gaps-out", gaps_out, "Gap report path (default <out>.gaps.csv)");
    ingest->add_flag("--strict", strict, "Abort on the first malformed row");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a model on a daily series");
    std::string fit_data, fit_out, fit_model = "forecaster";
    ForecasterFlags fit_flags;
    LagModelConfig fit_lag;
    fit->add_option("--data", fit_data)->required();
    fit->add_option("--out", fit_out)->required();
    fit->add_option("--model", fit_model)->check(CLI::IsMember({"forecaster", "baseline"}));
    fit_flags.attach(fit);
    fit->add_option("--input-sequence-length", fit_lag.input_sequence_length);
    fit->add_option("--ridge-epsilon", fit_lag.ridge_epsilon);

    // forecast
    auto* forecast = app.add_subcommand("forecast", "Forecast from a model file");
    std::string fc_model, fc_out;
    int horizon_days = 0;
    double fc_width = 0.8;
    int fc_samples = 300;
    forecast->add_option("--model", fc_model)->required();
    forecast->add_option("--out", fc_out)->required();
    forecast->add_option("--horizon-days", horizon_days)->required()
        ->check(CLI::PositiveNumber);
    auto* width_opt = forecast->add_option("--interval-width", fc_width);
    auto* samples_opt = forecast->add_option("--n-interval-samples", fc_samples);

    // decompose
    auto* decomp = app.add_subcommand("decompose", "Component curves of a fitted model");
    std::string dc_model, dc_out;
    decomp->add_option("--model", dc_model)->required();
    decomp->add_option("--out", dc_out)->required();

    // cv
    auto* cv = app.add_subcommand("cv", "Rolling-origin cross-validation");
    std::string cv_data, cv_out, cv_model = "forecaster";
    size_t cv_quantiles = 6, cv_folds = 4;
    ForecasterFlags cv_flags;
    LagModelConfig cv_lag;
    cv->add_option("--data", cv_data)->required();
    cv->add_option("--out", cv_out)->required();
    cv->add_option("--model", cv_model)->check(CLI::IsMember({"forecaster", "baseline"}));
    cv->add_option("--n-quantiles", cv_quantiles);
    cv->add_option("--n-folds", cv_folds);
    cv_flags.attach(cv);
    cv->add_option("--input-sequence-length", cv_lag.input_sequence_length);
    cv->add_option("--ridge-epsilon", cv_lag.ridge_epsilon);

    // tune
    auto* tune = app.add_subcommand("tune", "Bayesian hyperparameter search");
    std::string tn_data, tn_space, tn_prefix, tn_model = "forecaster";
    int tn_iterations = 25;
    size_t tn_quantiles = 6, tn_folds = 4;
    bool tn_timing = false;
    tune->add_option("--data", tn_data)->required();
    tune->add_option("--space", tn_space)->required();
    tune->add_option("--out-prefix", tn_prefix)->required();
    tune->add_option("--iterations", tn_iterations);
    tune->add_option("--model", tn_model)->check(CLI::IsMember({"forecaster", "baseline"}));
    tune->add_option("--n-quantiles", tn_quantiles);
    tune->add_option("--n-folds", tn_folds);
    tune->add_flag("--timing", tn_timing,
                   "Record real wall time per trial (breaks byte-identical re-runs)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            if (gaps_out.empty()) gaps_out = ingest_out + ".gaps.csv";
            return cmd_ingest(billing_path, ingest_out, gaps_out, strict);
        }
        if (*fit) {
            return cmd_fit(fit_data, fit_out, fit_model, fit_flags, fit, holidays_path,
                           fit_lag, seed);
        }
        if (*forecast) {
            return cmd_forecast(fc_model, fc_out, horizon_days, seed, fc_width,
                                fc_samples, width_opt->count() > 0,
                                samples_opt->count() > 0);
        }
        if (*decomp) return cmd_decompose(dc_model, dc_out);
        if (*cv) {
            return cmd_cv(cv_data, cv_model, cv_quantiles, cv_folds, cv_out, cv_flags,
                          cv, holidays_path, cv_lag, seed, jobs);
        }
        if (*tune) {
            return cmd_tune(tn_data, tn_space, tn_iterations, seed, tn_prefix, tn_model,
                            tn_quantiles, tn_folds, holidays_path, jobs, tn_timing);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
