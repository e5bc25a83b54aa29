#ifndef AQUACAST_OPTIM_HPP
#define AQUACAST_OPTIM_HPP

#include <Eigen/Core>

#include <functional>

namespace aquacast {

/// Objective callback: returns f(x) and fills grad (same size as x).
using ObjectiveFn =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
    int max_iterations = 10000;
    double gradient_tol = 1e-9;
    int memory = 10;
};

struct OptimResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace; // accepted iterates, non-increasing
};

/**
 * Limited-memory BFGS with Armijo backtracking. Deterministic; accepted
 * objective values are monotonically non-increasing. Converged means the
 * gradient tolerance was met or no further decrease was representable.
 * Throws std::runtime_error on non-finite objective or gradient at the
 * starting point.
 */
OptimResult minimize_lbfgs(const ObjectiveFn& f, Eigen::VectorXd x0,
                           const LbfgsOptions& options = {});

} // namespace aquacast

#endif
