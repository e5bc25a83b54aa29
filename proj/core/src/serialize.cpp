#include "aquacast/serialize.hpp"
#include "aquacast/util.hpp"

#include <json.hpp>

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace aquacast {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
}

json config_to_json(const ForecasterConfig& c) {
    return json{{"changepoint_prior_scale", c.changepoint_prior_scale},
                {"seasonality_prior_scale", c.seasonality_prior_scale},
                {"holiday_prior_scale", c.holiday_prior_scale},
                {"seasonality_mode", to_string(c.seasonality_mode)},
                {"n_changepoints", c.n_changepoints},
                {"changepoint_range", c.changepoint_range},
                {"yearly_order", c.yearly_order},
                {"weekly_order", c.weekly_order},
                {"interval_width", c.interval_width},
                {"n_interval_samples", c.n_interval_samples},
                {"rng_seed", c.rng_seed}};
}

// Missing keys keep their defaults so user config files can be partial.
ForecasterConfig config_from_json(const json& j) {
    ForecasterConfig c;
    c.changepoint_prior_scale =
        j.value("changepoint_prior_scale", c.changepoint_prior_scale);
    c.seasonality_prior_scale =
        j.value("seasonality_prior_scale", c.seasonality_prior_scale);
    c.holiday_prior_scale = j.value("holiday_prior_scale", c.holiday_prior_scale);
    if (j.contains("seasonality_mode")) {
        c.seasonality_mode =
            seasonality_mode_from_string(j.at("seasonality_mode").get<std::string>());
    }
    c.n_changepoints = j.value("n_changepoints", c.n_changepoints);
    c.changepoint_range = j.value("changepoint_range", c.changepoint_range);
    c.yearly_order = j.value("yearly_order", c.yearly_order);
    c.weekly_order = j.value("weekly_order", c.weekly_order);
    c.interval_width = j.value("interval_width", c.interval_width);
    c.n_interval_samples = j.value("n_interval_samples", c.n_interval_samples);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    return c;
}

} // namespace

void save_forecaster(const FittedForecaster& model, std::ostream& out) {
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["model_type"] = "forecaster";
    doc["epoch"] = model.scale.epoch.to_string();
    doc["span_days"] = model.scale.span_days;
    doc["y_scale"] = model.y_scale;
    doc["changepoints"] = model.changepoints;
    doc["k"] = model.k;
    doc["m"] = model.m;
    doc["delta"] = vector_to_json(model.delta);
    doc["beta_yearly"] = vector_to_json(model.beta_yearly);
    doc["beta_weekly"] = vector_to_json(model.beta_weekly);
    doc["holiday_names"] = model.holiday_names;
    doc["kappa"] = vector_to_json(model.kappa);
    doc["sigma"] = model.sigma;
    doc["config"] = config_to_json(model.config);
    json holidays = json::array();
    for (const auto& [date, name] : model.holidays.entries()) {
        holidays.push_back({{"date", date.to_string()}, {"name", name}});
    }
    doc["holidays"] = std::move(holidays);
    out << doc.dump(2) << '\n';
}

FittedForecaster load_forecaster(std::istream& in) {
    json doc = json::parse(in);
    if (doc.at("model_type").get<std::string>() != "forecaster") {
        throw std::runtime_error("model file is not a forecaster model");
    }
    if (doc.at("format_version").get<std::string>() != kModelFormatVersion) {
        throw std::runtime_error("unsupported model format version");
    }
    FittedForecaster model;
    auto epoch = Date::parse(doc.at("epoch").get<std::string>());
    if (!epoch) throw std::runtime_error("model file: bad epoch date");
    model.scale.epoch = *epoch;
    model.scale.span_days = doc.at("span_days").get<long>();
    model.y_scale = doc.at("y_scale").get<double>();
    model.changepoints = doc.at("changepoints").get<std::vector<double>>();
    model.k = doc.at("k").get<double>();
    model.m = doc.at("m").get<double>();
    model.delta = vector_from_json(doc.at("delta"));
    model.beta_yearly = vector_from_json(doc.at("beta_yearly"));
    model.beta_weekly = vector_from_json(doc.at("beta_weekly"));
    model.holiday_names = doc.at("holiday_names").get<std::vector<std::string>>();
    model.kappa = vector_from_json(doc.at("kappa"));
    model.sigma = doc.at("sigma").get<double>();
    model.config = config_from_json(doc.at("config"));
    for (const auto& item : doc.at("holidays")) {
        auto date = Date::parse(item.at("date").get<std::string>());
        if (!date) throw std::runtime_error("model file: bad holiday date");
        model.holidays.add(*date, item.at("name").get<std::string>());
    }
    return model;
}

void save_lag_model(const SavedLagModel& saved, std::ostream& out) {
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["model_type"] = "ols_lag";
    doc["intercept"] = saved.model.intercept;
    doc["weights"] = vector_to_json(saved.model.weights);
    doc["input_sequence_length"] = saved.config.input_sequence_length;
    doc["ridge_epsilon"] = saved.config.ridge_epsilon;
    doc["last_train_date"] = saved.last_train_date.to_string();
    doc["tail_window"] = saved.tail_window;
    out << doc.dump(2) << '\n';
}

SavedLagModel load_lag_model(std::istream& in) {
    json doc = json::parse(in);
    if (doc.at("model_type").get<std::string>() != "ols_lag") {
        throw std::runtime_error("model file is not an OLS lag model");
    }
    if (doc.at("format_version").get<std::string>() != kModelFormatVersion) {
        throw std::runtime_error("unsupported model format version");
    }
    SavedLagModel saved;
    saved.model.intercept = doc.at("intercept").get<double>();
    saved.model.weights = vector_from_json(doc.at("weights"));
    saved.config.input_sequence_length = doc.at("input_sequence_length").get<int>();
    saved.config.ridge_epsilon = doc.at("ridge_epsilon").get<double>();
    auto date = Date::parse(doc.at("last_train_date").get<std::string>());
    if (!date) throw std::runtime_error("model file: bad last_train_date");
    saved.last_train_date = *date;
    saved.tail_window = doc.at("tail_window").get<std::vector<double>>();
    return saved;
}

std::string model_file_type(std::istream& in) {
    try {
        json doc = json::parse(in);
        return doc.at("model_type").get<std::string>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("not a model file: ") + e.what());
    }
}

void write_forecast_csv(const Forecast& forecast, std::ostream& out) {
    out << "date,yhat,yhat_lower,yhat_upper,trend,yearly,weekly,holidays\n";
    for (const auto& r : forecast.rows) {
        out << r.date.to_string() << ',' << format_double(r.yhat) << ','
            << format_double(r.yhat_lower) << ',' << format_double(r.yhat_upper) << ','
            << format_double(r.trend) << ',' << format_double(r.yearly) << ','
            << format_double(r.weekly) << ',' << format_double(r.holidays) << '\n';
    }
}

void write_components_csv(const std::vector<ComponentCurve>& curves,
                          std::ostream& out) {
    out << "component,x,value\n";
    for (const auto& curve : curves) {
        for (size_t i = 0; i < curve.x.size(); ++i) {
            out << curve.component << ',' << curve.x[i] << ','
                << format_double(curve.values[i]) << '\n';
        }
    }
}

void write_cv_report_csv(const CVReport& report, std::ostream& out) {
    out << "fold,mae,mape,mse,rmse\n";
    for (size_t i = 0; i < report.folds.size(); ++i) {
        const auto& f = report.folds[i];
        out << i << ',' << format_double(f.mae) << ',' << format_double(f.mape) << ','
            << format_double(f.mse) << ',' << format_double(f.rmse) << '\n';
    }
    out << "mean," << format_double(report.mean.mae) << ','
        << format_double(report.mean.mape) << ',' << format_double(report.mean.mse)
        << ',' << format_double(report.mean.rmse) << '\n';
    out << "std," << format_double(report.stddev.mae) << ','
        << format_double(report.stddev.mape) << ','
        << format_double(report.stddev.mse) << ','
        << format_double(report.stddev.rmse) << '\n';
}

void write_history_csv(const SearchSpace& space,
                       const std::vector<TrialRecord>& history, std::ostream& out) {
    out << "iteration";
    for (const auto& dim : space.dims) out << ',' << dim.name;
    out << ",mape_mean,mape_std,mae_mean,status,seconds\n";
    for (const auto& trial : history) {
        out << trial.iteration;
        for (const auto& value : trial.assignment) {
            out << ',' << param_value_to_string(value);
        }
        out << ',' << format_double(trial.objective) << ','
            << format_double(trial.mape_std) << ',' << format_double(trial.mae_mean)
            << ',' << (trial.failed ? "failed" : "ok") << ','
            << format_double(trial.seconds) << '\n';
    }
}

void write_pdp_csv(const std::vector<PdpGrid>& grids, std::ostream& out) {
    out << "dim1,dim2,x1,x2,value\n";
    for (const auto& grid : grids) {
        for (size_t i = 0; i < grid.values.size(); ++i) {
            out << grid.dim1 << ',' << grid.dim2 << ',' << grid.x1[i] << ','
                << grid.x2[i] << ',' << format_double(grid.values[i]) << '\n';
        }
    }
}

void write_gap_report_csv(const std::vector<GapRange>& gaps, std::ostream& out) {
    out << "gap_start,gap_end\n";
    for (const auto& gap : gaps) {
        out << gap.start.to_string() << ',' << gap.end.to_string() << '\n';
    }
}

ForecasterConfig forecaster_config_from_json(std::istream& in) {
    json doc = json::parse(in);
    // Accept either a bare config object or a best-config file that
    // nests it under "config".
    if (doc.contains("config")) return config_from_json(doc.at("config"));
    return config_from_json(doc);
}

void forecaster_config_to_json(const ForecasterConfig& config, std::ostream& out) {
    out << config_to_json(config).dump(2) << '\n';
}

} // namespace aquacast
