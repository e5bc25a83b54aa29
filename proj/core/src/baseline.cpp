#include "aquacast/baseline.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace aquacast {

void LagModelConfig::validate() const {
    if (input_sequence_length < 1) {
        throw std::invalid_argument("input_sequence_length must be >= 1");
    }
    if (ridge_epsilon < 0.0) {
        throw std::invalid_argument("ridge_epsilon must be >= 0");
    }
}

LagMatrix build_lag_matrix(const DailySeries& series, int input_sequence_length) {
    const int tx = input_sequence_length;
    if (tx < 1) {
        throw std::invalid_argument("build_lag_matrix: T_x must be >= 1");
    }
    if (series.size() < static_cast<size_t>(tx) + 1) {
        throw std::invalid_argument("build_lag_matrix: series shorter than T_x + 1");
    }
    const auto& pts = series.points();
    std::vector<Eigen::Index> starts;
    // A window is valid when the tx+1 consecutive records are consecutive
    // calendar days (no gap inside).
    for (size_t i = 0; i + static_cast<size_t>(tx) < pts.size(); ++i) {
        size_t end = i + static_cast<size_t>(tx);
        if (pts[end].date - pts[i].date == tx) {
            starts.push_back(static_cast<Eigen::Index>(i));
        }
    }
    if (starts.empty()) {
        throw std::runtime_error("build_lag_matrix: no gap-free window of length T_x + 1");
    }
    LagMatrix out;
    out.rows.resize(static_cast<Eigen::Index>(starts.size()), tx);
    out.targets.resize(static_cast<Eigen::Index>(starts.size()));
    out.target_dates.reserve(starts.size());
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(starts.size()); ++r) {
        size_t i = static_cast<size_t>(starts[static_cast<size_t>(r)]);
        for (int c = 0; c < tx; ++c) {
            out.rows(r, c) = pts[i + static_cast<size_t>(c)].value;
        }
        out.targets[r] = pts[i + static_cast<size_t>(tx)].value;
        out.target_dates.push_back(pts[i + static_cast<size_t>(tx)].date);
    }
    return out;
}

FittedLagModel fit_ols(const Eigen::MatrixXd& rows, const Eigen::VectorXd& targets,
                       const LagModelConfig& config) {
    config.validate();
    const Eigen::Index n = rows.rows();
    const Eigen::Index tx = rows.cols();
    if (n != targets.size()) {
        throw std::invalid_argument("fit_ols: row/target length mismatch");
    }
    if (n < tx + 1) {
        throw std::invalid_argument("fit_ols: need at least T_x + 1 rows");
    }
    // Augmented design [1 | rows]; ridge applies to the weights only.
    Eigen::MatrixXd design(n, tx + 1);
    design.col(0).setOnes();
    design.rightCols(tx) = rows;

    Eigen::MatrixXd normal = design.transpose() * design;
    normal.bottomRightCorner(tx, tx) +=
        config.ridge_epsilon * Eigen::MatrixXd::Identity(tx, tx);
    Eigen::VectorXd rhs = design.transpose() * targets;

    Eigen::LDLT<Eigen::MatrixXd> solver(normal);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("fit_ols: normal equations are singular");
    }
    Eigen::VectorXd solution = solver.solve(rhs);
    if (!solution.allFinite()) {
        throw std::runtime_error("fit_ols: singular system, non-finite solution");
    }
    FittedLagModel model;
    model.intercept = solution[0];
    model.weights = solution.tail(tx);
    return model;
}

std::vector<double> forecast_recursive(const FittedLagModel& model,
                                       std::vector<double> history, int horizon) {
    const size_t tx = static_cast<size_t>(model.weights.size());
    if (history.size() != tx) {
        throw std::invalid_argument("forecast_recursive: history must hold exactly T_x values");
    }
    if (horizon < 1) {
        throw std::invalid_argument("forecast_recursive: horizon must be >= 1");
    }
    std::vector<double> predictions;
    predictions.reserve(static_cast<size_t>(horizon));
    for (int step = 0; step < horizon; ++step) {
        double value = model.intercept;
        for (size_t i = 0; i < tx; ++i) {
            value += model.weights[static_cast<Eigen::Index>(i)] * history[i];
        }
        predictions.push_back(value);
        history.erase(history.begin());
        history.push_back(value);
    }
    return predictions;
}

} // namespace aquacast
