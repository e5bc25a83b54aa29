#include "aquacast/forecaster.hpp"
#include "aquacast/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace aquacast {

namespace {

constexpr double kL1Epsilon = 1e-8; // smoothing of |delta| in the objective

std::uint64_t sample_stream_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 step keyed by sample index
    std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double pos = q * static_cast<double>(n - 1);
    size_t lo = static_cast<size_t>(pos);
    if (lo >= n - 1) return sorted[n - 1];
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

} // namespace

std::string to_string(SeasonalityMode mode) {
    return mode == SeasonalityMode::Additive ? "additive" : "multiplicative";
}

SeasonalityMode seasonality_mode_from_string(const std::string& text) {
    if (text == "additive") return SeasonalityMode::Additive;
    if (text == "multiplicative") return SeasonalityMode::Multiplicative;
    throw std::invalid_argument("unknown seasonality mode '" + text + "'");
}

void ForecasterConfig::validate() const {
    if (!(changepoint_prior_scale > 0) || !(seasonality_prior_scale > 0) ||
        !(holiday_prior_scale > 0)) {
        throw std::invalid_argument("prior scales must be > 0");
    }
    if (n_changepoints < 0) {
        throw std::invalid_argument("n_changepoints must be >= 0");
    }
    if (!(changepoint_range > 0.0) || changepoint_range > 1.0) {
        throw std::invalid_argument("changepoint_range must be in (0, 1]");
    }
    if (yearly_order < 0 || weekly_order < 0) {
        throw std::invalid_argument("Fourier orders must be >= 0");
    }
    if (!(interval_width > 0.0) || !(interval_width < 1.0)) {
        throw std::invalid_argument("interval_width must be in (0, 1)");
    }
    if (n_interval_samples < 1) {
        throw std::invalid_argument("n_interval_samples must be >= 1");
    }
}

std::vector<size_t> changepoint_indices(size_t n_dates, int n_changepoints,
                                        double range) {
    std::vector<size_t> indices;
    if (n_dates < 2 || n_changepoints <= 0) return indices;
    size_t count = std::min<size_t>(static_cast<size_t>(n_changepoints), n_dates - 1);
    size_t hi = static_cast<size_t>(std::floor(range * static_cast<double>(n_dates)));
    for (size_t j = 1; j <= count; ++j) {
        size_t idx = static_cast<size_t>(
            std::floor(static_cast<double>(hi) * static_cast<double>(j) /
                       static_cast<double>(count + 1)));
        if (idx == 0 || idx >= n_dates) continue;
        if (!indices.empty() && indices.back() == idx) continue;
        indices.push_back(idx);
    }
    return indices;
}

std::vector<double> place_changepoints(const std::vector<Date>& train_dates,
                                       const ForecasterConfig& config,
                                       const TimeScale& scale) {
    if (train_dates.size() < 2) {
        throw std::invalid_argument("place_changepoints: need at least 2 dates");
    }
    auto indices = changepoint_indices(train_dates.size(), config.n_changepoints,
                                       config.changepoint_range);
    std::vector<double> times;
    times.reserve(indices.size());
    for (size_t idx : indices) {
        times.push_back(scale.to_model_time(train_dates[idx]));
    }
    return times;
}

double trend_value(double t, double k, double m,
                   const std::vector<double>& changepoints,
                   const Eigen::VectorXd& delta) {
    double slope = k;
    double offset = m;
    for (size_t j = 0; j < changepoints.size(); ++j) {
        if (t >= changepoints[j]) {
            slope += delta[static_cast<Eigen::Index>(j)];
            offset -= changepoints[j] * delta[static_cast<Eigen::Index>(j)];
        }
    }
    return slope * t + offset;
}

std::vector<double> fourier_features_at(double u_days, double period_days,
                                        int order) {
    if (!(period_days > 0)) {
        throw std::invalid_argument("fourier period must be > 0");
    }
    std::vector<double> features;
    features.reserve(static_cast<size_t>(2 * order));
    for (int n = 1; n <= order; ++n) {
        double angle = 2.0 * std::numbers::pi * n * u_days / period_days;
        features.push_back(std::sin(angle));
        features.push_back(std::cos(angle));
    }
    return features;
}

std::vector<double> fourier_features(Date date, double period_days, int order) {
    return fourier_features_at(static_cast<double>(date.days_since_epoch()),
                               period_days, order);
}

std::vector<double> holiday_features(Date date, const HolidayTable& table,
                                     const std::vector<std::string>& names) {
    std::vector<double> features(names.size(), 0.0);
    if (auto name = table.lookup(date)) {
        auto it = std::find(names.begin(), names.end(), *name);
        if (it != names.end()) {
            features[static_cast<size_t>(it - names.begin())] = 1.0;
        }
    }
    return features;
}

FitProblem::FitProblem(const DailySeries& series, const ForecasterConfig& config,
                       const HolidayTable& holidays)
    : config_(config) {
    config.validate();
    const size_t n = series.size();
    const size_t min_obs = 2 * static_cast<size_t>(config.yearly_order + config.weekly_order) +
                           static_cast<size_t>(std::max(config.n_changepoints, 0)) + 10;
    if (n < min_obs) {
        throw std::invalid_argument(
            "fit: too few observations (" + std::to_string(n) + " < " +
            std::to_string(min_obs) + " required by the configuration)");
    }
    auto dates = series.dates();
    scale_ = TimeScale{series.first_date(),
                       std::max<long>(1, series.last_date() - series.first_date())};

    double max_abs = 0.0;
    for (const auto& p : series.points()) max_abs = std::max(max_abs, std::abs(p.value));
    y_scale_ = max_abs > 0.0 ? max_abs : 1.0;

    changepoints_ = place_changepoints(dates, config, scale_);
    holiday_names_ = holidays.names();

    const Eigen::Index N = static_cast<Eigen::Index>(n);
    const Eigen::Index J = static_cast<Eigen::Index>(changepoints_.size());
    const Eigen::Index S = 2 * (config.yearly_order + config.weekly_order);
    const Eigen::Index H = static_cast<Eigen::Index>(holiday_names_.size());

    t_.resize(N);
    y_norm_.resize(N);
    cp_design_.resize(N, J);
    season_design_.resize(N, S);
    holiday_design_.resize(N, H);

    for (Eigen::Index i = 0; i < N; ++i) {
        const auto& p = series.points()[static_cast<size_t>(i)];
        t_[i] = scale_.to_model_time(p.date);
        y_norm_[i] = p.value / y_scale_;
        for (Eigen::Index j = 0; j < J; ++j) {
            double s = changepoints_[static_cast<size_t>(j)];
            cp_design_(i, j) = t_[i] >= s ? t_[i] - s : 0.0;
        }
        auto yearly = fourier_features(p.date, kYearDays, config.yearly_order);
        auto weekly = fourier_features(p.date, kWeekDays, config.weekly_order);
        for (size_t c = 0; c < yearly.size(); ++c) {
            season_design_(i, static_cast<Eigen::Index>(c)) = yearly[c];
        }
        for (size_t c = 0; c < weekly.size(); ++c) {
            season_design_(i, static_cast<Eigen::Index>(yearly.size() + c)) = weekly[c];
        }
        auto hol = holiday_features(p.date, holidays, holiday_names_);
        for (size_t c = 0; c < hol.size(); ++c) {
            holiday_design_(i, static_cast<Eigen::Index>(c)) = hol[c];
        }
    }
    n_params_ = static_cast<int>(2 + J + S + H);
}

Eigen::VectorXd FitProblem::predict_normalized(const Eigen::VectorXd& p) const {
    const Eigen::Index J = cp_design_.cols();
    const Eigen::Index S = season_design_.cols();
    const Eigen::Index H = holiday_design_.cols();
    double k = p[0];
    double m = p[1];
    Eigen::VectorXd trend = k * t_;
    trend.array() += m;
    if (J > 0) trend += cp_design_ * p.segment(2, J);
    Eigen::VectorXd extras = Eigen::VectorXd::Zero(t_.size());
    if (S > 0) extras += season_design_ * p.segment(2 + J, S);
    if (H > 0) extras += holiday_design_ * p.segment(2 + J + S, H);
    if (config_.seasonality_mode == SeasonalityMode::Additive) {
        return trend + extras;
    }
    return trend.array() * (1.0 + extras.array());
}

double FitProblem::value_and_gradient(const Eigen::VectorXd& p,
                                      Eigen::VectorXd& grad) const {
    const Eigen::Index J = cp_design_.cols();
    const Eigen::Index S = season_design_.cols();
    const Eigen::Index H = holiday_design_.cols();

    double k = p[0];
    double m = p[1];
    Eigen::VectorXd trend = k * t_;
    trend.array() += m;
    if (J > 0) trend += cp_design_ * p.segment(2, J);
    Eigen::VectorXd extras = Eigen::VectorXd::Zero(t_.size());
    if (S > 0) extras += season_design_ * p.segment(2 + J, S);
    if (H > 0) extras += holiday_design_ * p.segment(2 + J + S, H);

    const bool additive = config_.seasonality_mode == SeasonalityMode::Additive;
    Eigen::VectorXd yhat =
        additive ? (trend + extras).eval()
                 : (trend.array() * (1.0 + extras.array())).matrix().eval();
    Eigen::VectorXd r = yhat - y_norm_;

    double value = 0.5 * r.squaredNorm();

    grad.resize(n_params_);
    // Residual weight seen by trend parameters / by seasonal parameters.
    Eigen::VectorXd r_trend =
        additive ? r : (r.array() * (1.0 + extras.array())).matrix().eval();
    Eigen::VectorXd r_extras =
        additive ? r : (r.array() * trend.array()).matrix().eval();

    grad[0] = r_trend.dot(t_);
    grad[1] = r_trend.sum();
    if (J > 0) grad.segment(2, J) = cp_design_.transpose() * r_trend;
    if (S > 0) grad.segment(2 + J, S) = season_design_.transpose() * r_extras;
    if (H > 0) grad.segment(2 + J + S, H) = holiday_design_.transpose() * r_extras;

    // Priors: smoothed Laplace on delta, Gaussian on beta and kappa.
    const double tau = config_.changepoint_prior_scale;
    const double sps2 = config_.seasonality_prior_scale * config_.seasonality_prior_scale;
    const double hps2 = config_.holiday_prior_scale * config_.holiday_prior_scale;
    for (Eigen::Index j = 0; j < J; ++j) {
        double d = p[2 + j];
        double smooth = std::sqrt(d * d + kL1Epsilon * kL1Epsilon);
        value += smooth / tau;
        grad[2 + j] += d / (smooth * tau);
    }
    if (S > 0) {
        auto beta = p.segment(2 + J, S);
        value += 0.5 * beta.squaredNorm() / sps2;
        grad.segment(2 + J, S) += beta / sps2;
    }
    if (H > 0) {
        auto kap = p.segment(2 + J + S, H);
        value += 0.5 * kap.squaredNorm() / hps2;
        grad.segment(2 + J + S, H) += kap / hps2;
    }
    return value;
}

Eigen::VectorXd FitProblem::initial_point() const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n_params_);
    // Line through the first and last normalized observations.
    const Eigen::Index N = y_norm_.size();
    double t0 = t_[0], t1 = t_[N - 1];
    double k0 = (y_norm_[N - 1] - y_norm_[0]) / std::max(1e-12, t1 - t0);
    p[0] = k0;
    p[1] = y_norm_[0] - k0 * t0;
    return p;
}

FittedForecaster FitProblem::unpack(const Eigen::VectorXd& p,
                                    const HolidayTable& holidays) const {
    const Eigen::Index J = cp_design_.cols();
    const Eigen::Index Sy = 2 * config_.yearly_order;
    const Eigen::Index Sw = 2 * config_.weekly_order;
    const Eigen::Index H = holiday_design_.cols();

    FittedForecaster model;
    model.scale = scale_;
    model.y_scale = y_scale_;
    model.changepoints = changepoints_;
    model.k = p[0];
    model.m = p[1];
    model.delta = p.segment(2, J);
    model.beta_yearly = p.segment(2 + J, Sy);
    model.beta_weekly = p.segment(2 + J + Sy, Sw);
    model.holiday_names = holiday_names_;
    model.kappa = p.segment(2 + J + Sy + Sw, H);
    model.config = config_;
    model.holidays = holidays;

    Eigen::VectorXd residuals = predict_normalized(p) - y_norm_;
    double mean = residuals.mean();
    model.sigma = std::sqrt((residuals.array() - mean).square().mean());
    return model;
}

FittedForecaster fit_forecaster(const DailySeries& series,
                                const ForecasterConfig& config,
                                const HolidayTable& holidays) {
    FitProblem problem(series, config, holidays);
    auto objective = [&problem](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        return problem.value_and_gradient(x, g);
    };
    OptimResult result;
    try {
        result = minimize_lbfgs(objective, problem.initial_point());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string("fit: ") + e.what());
    }
    if (!result.converged) {
        throw std::runtime_error(
            "fit: failed to converge (iterations=" + std::to_string(result.iterations) +
            ", |grad|=" + std::to_string(result.gradient_norm) +
            ", objective=" + std::to_string(result.objective) + ")");
    }
    return problem.unpack(result.x, holidays);
}

namespace {

struct Components {
    double trend, yearly, weekly, holidays, yhat;
};

Components evaluate_components(const FittedForecaster& model, Date date) {
    double t = model.scale.to_model_time(date);
    double g = trend_value(t, model.k, model.m, model.changepoints, model.delta);

    auto dot = [](const std::vector<double>& x, const Eigen::VectorXd& w) {
        double acc = 0.0;
        for (size_t i = 0; i < x.size(); ++i) acc += x[i] * w[static_cast<Eigen::Index>(i)];
        return acc;
    };
    double yr = dot(fourier_features(date, kYearDays, model.config.yearly_order),
                    model.beta_yearly);
    double wk = dot(fourier_features(date, kWeekDays, model.config.weekly_order),
                    model.beta_weekly);
    double hol = dot(holiday_features(date, model.holidays, model.holiday_names),
                     model.kappa);

    Components c{};
    if (model.config.seasonality_mode == SeasonalityMode::Additive) {
        c.trend = g * model.y_scale;
        c.yearly = yr * model.y_scale;
        c.weekly = wk * model.y_scale;
        c.holidays = hol * model.y_scale;
        c.yhat = c.trend + c.yearly + c.weekly + c.holidays;
    } else {
        // yhat = trend * (1 + yearly + weekly + holidays); seasonal terms
        // are dimensionless multipliers in this mode.
        c.trend = g * model.y_scale;
        c.yearly = yr;
        c.weekly = wk;
        c.holidays = hol;
        c.yhat = c.trend * (1.0 + yr + wk + hol);
    }
    return c;
}

} // namespace

Forecast predict(const FittedForecaster& model, const std::vector<Date>& dates) {
    Forecast out;
    out.rows.reserve(dates.size());
    for (Date d : dates) {
        auto c = evaluate_components(model, d);
        out.rows.push_back({d, c.yhat, c.yhat, c.yhat, c.trend, c.yearly, c.weekly,
                            c.holidays});
    }
    return out;
}

Forecast predict_with_intervals(const FittedForecaster& model,
                                const std::vector<Date>& dates,
                                const ForecasterConfig& config) {
    Forecast out = predict(model, dates);
    if (dates.empty()) return out;
    const int n_samples = config.n_interval_samples;
    const double q_lo = (1.0 - config.interval_width) / 2.0;
    const double q_hi = 1.0 - q_lo;

    const Date last_train = model.scale.epoch + model.scale.span_days;
    Date max_date = dates[0];
    for (Date d : dates) max_date = std::max(max_date, d);

    // Historical changepoint rate over the changepoint-covered span.
    const double covered_days =
        model.config.changepoint_range * static_cast<double>(model.scale.span_days);
    const double rate = model.changepoints.empty() || covered_days <= 0
                            ? 0.0
                            : static_cast<double>(model.changepoints.size()) / covered_days;
    const double laplace_scale =
        model.delta.size() > 0 ? model.delta.cwiseAbs().mean() : 0.0;

    std::vector<double> future_t; // model times of potential future changepoint days
    for (Date d = last_train + 1; d <= max_date; ++d) {
        future_t.push_back(model.scale.to_model_time(d));
    }

    std::vector<std::vector<double>> samples(dates.size());
    for (auto& s : samples) s.reserve(static_cast<size_t>(n_samples));

    const bool additive = model.config.seasonality_mode == SeasonalityMode::Additive;

    for (int s = 0; s < n_samples; ++s) {
        std::mt19937_64 rng(sample_stream_seed(config.rng_seed, static_cast<std::uint64_t>(s)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> noise(0.0, model.sigma);

        std::vector<std::pair<double, double>> future_cps; // (time, slope change)
        if (rate > 0.0 && laplace_scale > 0.0) {
            for (double ft : future_t) {
                if (unif(rng) < rate) {
                    double u = unif(rng) - 0.5;
                    double mag = -laplace_scale * std::copysign(1.0, u) *
                                 std::log(1.0 - 2.0 * std::abs(u));
                    future_cps.emplace_back(ft, mag);
                }
            }
        }

        for (size_t i = 0; i < dates.size(); ++i) {
            double t = model.scale.to_model_time(dates[i]);
            double pert = 0.0;
            for (const auto& [ct, mag] : future_cps) {
                if (t >= ct) pert += mag * (t - ct);
            }
            double eps = noise(rng);
            double value;
            if (additive) {
                value = out.rows[i].yhat + model.y_scale * (pert + eps);
            } else {
                double factor = out.rows[i].trend != 0.0
                                    ? out.rows[i].yhat / out.rows[i].trend
                                    : 1.0;
                value = (out.rows[i].trend + model.y_scale * pert) * factor +
                        model.y_scale * eps;
            }
            samples[i].push_back(value);
        }
    }

    for (size_t i = 0; i < dates.size(); ++i) {
        std::sort(samples[i].begin(), samples[i].end());
        out.rows[i].yhat_lower = quantile_sorted(samples[i], q_lo);
        out.rows[i].yhat_upper = quantile_sorted(samples[i], q_hi);
    }
    return out;
}

std::vector<ComponentCurve> decompose(const FittedForecaster& model,
                                      const std::vector<Date>& dates) {
    std::vector<ComponentCurve> curves;

    ComponentCurve trend{"trend", {}, {}};
    ComponentCurve holidays{"holidays", {}, {}};
    for (Date d : dates) {
        auto c = evaluate_components(model, d);
        trend.x.push_back(d.to_string());
        trend.values.push_back(c.trend);
        holidays.x.push_back(d.to_string());
        holidays.values.push_back(c.holidays);
    }

    const double season_scale =
        model.config.seasonality_mode == SeasonalityMode::Additive ? model.y_scale : 1.0;

    ComponentCurve yearly{"yearly", {}, {}};
    for (int day = 0; day <= 365; ++day) {
        auto f = fourier_features_at(day, kYearDays, model.config.yearly_order);
        double v = 0.0;
        for (size_t i = 0; i < f.size(); ++i) {
            v += f[i] * model.beta_yearly[static_cast<Eigen::Index>(i)];
        }
        yearly.x.push_back(std::to_string(day));
        yearly.values.push_back(v * season_scale);
    }

    ComponentCurve weekly{"weekly", {}, {}};
    for (int day = 0; day <= 6; ++day) {
        auto f = fourier_features_at(day, kWeekDays, model.config.weekly_order);
        double v = 0.0;
        for (size_t i = 0; i < f.size(); ++i) {
            v += f[i] * model.beta_weekly[static_cast<Eigen::Index>(i)];
        }
        weekly.x.push_back(std::to_string(day));
        weekly.values.push_back(v * season_scale);
    }

    curves.push_back(std::move(trend));
    curves.push_back(std::move(yearly));
    curves.push_back(std::move(weekly));
    curves.push_back(std::move(holidays));
    return curves;
}

} // namespace aquacast
