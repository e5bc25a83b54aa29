#ifndef AQUACAST_FORECASTER_HPP
#define AQUACAST_FORECASTER_HPP

#include "aquacast/billing.hpp"
#include "aquacast/calendar.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace aquacast {

inline constexpr double kYearDays = 365.25;
inline constexpr double kWeekDays = 7.0;

enum class SeasonalityMode { Additive, Multiplicative };

std::string to_string(SeasonalityMode mode);
SeasonalityMode seasonality_mode_from_string(const std::string& text);

struct ForecasterConfig {
    double changepoint_prior_scale = 0.05;  // tau, Laplace prior on delta
    double seasonality_prior_scale = 10.0;
    double holiday_prior_scale = 10.0;
    SeasonalityMode seasonality_mode = SeasonalityMode::Additive;
    int n_changepoints = 25;
    double changepoint_range = 0.8; // trend fixed after this fraction of training
    int yearly_order = 10;
    int weekly_order = 3;
    double interval_width = 0.8;
    int n_interval_samples = 300;
    std::uint64_t rng_seed = 42;

    void validate() const; // throws std::invalid_argument on bad fields
};

/**
 * Fitted additive model y(d) = g(d) + s(d) + h(d) + eps. The trend g is
 * piecewise linear and continuous: each changepoint j carries a slope
 * adjustment delta_j and the implied offset adjustment -s_j * delta_j.
 * All parameters live in normalized units (observations divided by
 * y_scale, dates mapped through the time scale).
 */
struct FittedForecaster {
    TimeScale scale;
    double y_scale = 1.0;
    std::vector<double> changepoints; // model times, ascending
    double k = 0.0;                   // base growth rate
    double m = 0.0;                   // base offset
    Eigen::VectorXd delta;            // per-changepoint rate adjustments
    Eigen::VectorXd beta_yearly;      // 2 * yearly_order
    Eigen::VectorXd beta_weekly;      // 2 * weekly_order
    std::vector<std::string> holiday_names; // sorted
    Eigen::VectorXd kappa;            // one per holiday name
    double sigma = 0.0;               // residual scale, normalized units
    ForecasterConfig config;
    HolidayTable holidays;
};

struct ForecastRow {
    Date date;
    double yhat = 0.0;
    double yhat_lower = 0.0;
    double yhat_upper = 0.0;
    double trend = 0.0;
    double yearly = 0.0;
    double weekly = 0.0;
    double holidays = 0.0;
};

struct Forecast {
    std::vector<ForecastRow> rows;
};

/// One component of a fitted model, evaluated on its natural axis
/// (dates for trend/holidays, day-of-period for seasonalities).
struct ComponentCurve {
    std::string component;
    std::vector<std::string> x;
    std::vector<double> values;
};

/// Changepoint positions as indices into the observed-date list:
/// uniformly spaced over the first `range` fraction, never index 0.
std::vector<size_t> changepoint_indices(size_t n_dates, int n_changepoints,
                                        double range);

std::vector<double> place_changepoints(const std::vector<Date>& train_dates,
                                       const ForecasterConfig& config,
                                       const TimeScale& scale);

/// Piecewise-linear continuous trend at model time t.
double trend_value(double t, double k, double m,
                   const std::vector<double>& changepoints,
                   const Eigen::VectorXd& delta);

/// [sin(2*pi*n*u/period), cos(2*pi*n*u/period)] for n = 1..order, with u
/// measured in days since 1970-01-01 so features do not depend on the fit.
std::vector<double> fourier_features(Date date, double period_days, int order);
std::vector<double> fourier_features_at(double u_days, double period_days, int order);

/// Indicator over `names` (unit at the matching holiday, else zeros).
std::vector<double> holiday_features(Date date, const HolidayTable& table,
                                     const std::vector<std::string>& names);

/**
 * Penalized MAP objective for one training set. Exposed so the analytic
 * gradient can be checked against finite differences independently of
 * the optimizer.
 *
 * Parameter layout: [k, m, delta (J), beta_yearly, beta_weekly, kappa].
 */
class FitProblem {
public:
    FitProblem(const DailySeries& series, const ForecasterConfig& config,
               const HolidayTable& holidays);

    int n_params() const { return n_params_; }
    const TimeScale& scale() const { return scale_; }
    double y_scale() const { return y_scale_; }
    const std::vector<double>& changepoints() const { return changepoints_; }
    const std::vector<std::string>& holiday_names() const { return holiday_names_; }

    double value_and_gradient(const Eigen::VectorXd& params,
                              Eigen::VectorXd& grad) const;

    /// Normalized model output at the training dates.
    Eigen::VectorXd predict_normalized(const Eigen::VectorXd& params) const;

    Eigen::VectorXd initial_point() const;
    FittedForecaster unpack(const Eigen::VectorXd& params,
                            const HolidayTable& holidays) const;

private:
    ForecasterConfig config_;
    TimeScale scale_;
    double y_scale_ = 1.0;
    std::vector<double> changepoints_;
    std::vector<std::string> holiday_names_;
    Eigen::VectorXd t_;
    Eigen::VectorXd y_norm_;
    Eigen::MatrixXd cp_design_;      // (t - s_j)+ per changepoint
    Eigen::MatrixXd season_design_;  // yearly then weekly Fourier columns
    Eigen::MatrixXd holiday_design_;
    int n_params_ = 0;
};

/// MAP fit of the additive model; deterministic (no RNG involved).
FittedForecaster fit_forecaster(const DailySeries& series,
                                const ForecasterConfig& config,
                                const HolidayTable& holidays);

/// Point forecast with components; lower/upper are set equal to yhat.
Forecast predict(const FittedForecaster& model, const std::vector<Date>& dates);

/**
 * Point forecast plus Monte-Carlo uncertainty bounds. Future trend
 * uncertainty is simulated by sampling changepoints past the training
 * window at the historical rate with Laplace-distributed magnitudes;
 * observation noise is Normal(0, sigma). Deterministic given the seed.
 */
Forecast predict_with_intervals(const FittedForecaster& model,
                                const std::vector<Date>& dates,
                                const ForecasterConfig& config);

std::vector<ComponentCurve> decompose(const FittedForecaster& model,
                                      const std::vector<Date>& dates);

} // namespace aquacast

#endif
