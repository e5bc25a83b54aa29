#ifndef AQUACAST_BASELINE_HPP
#define AQUACAST_BASELINE_HPP

#include "aquacast/billing.hpp"

#include <Eigen/Core>

#include <vector>

namespace aquacast {

struct LagModelConfig {
    int input_sequence_length = 300; // T_x
    double ridge_epsilon = 1e-8;

    void validate() const;
};

/// OLS regression of next-day consumption on the previous T_x days.
struct FittedLagModel {
    double intercept = 0.0;
    Eigen::VectorXd weights; // oldest lag first, length T_x
};

struct LagMatrix {
    Eigen::MatrixXd rows;    // one row per target, lags oldest-first
    Eigen::VectorXd targets;
    std::vector<Date> target_dates;
};

/**
 * One row per date whose T_x preceding calendar days are all present;
 * windows crossing gaps are skipped. Throws if no valid window exists.
 */
LagMatrix build_lag_matrix(const DailySeries& series, int input_sequence_length);

/// Normal equations with a small ridge term on the weights.
FittedLagModel fit_ols(const Eigen::MatrixXd& rows, const Eigen::VectorXd& targets,
                       const LagModelConfig& config);

/**
 * Multi-step forecast: each prediction is appended to the window and the
 * oldest value dropped before the next step. `history` holds the last
 * T_x observed values, oldest first.
 */
std::vector<double> forecast_recursive(const FittedLagModel& model,
                                       std::vector<double> history, int horizon);

} // namespace aquacast

#endif
