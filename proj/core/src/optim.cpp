#include "aquacast/optim.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace aquacast {

namespace {

bool all_finite(const Eigen::VectorXd& v) {
    return v.allFinite();
}

} // namespace

OptimResult minimize_lbfgs(const ObjectiveFn& f, Eigen::VectorXd x0,
                           const LbfgsOptions& options) {
    const int n = static_cast<int>(x0.size());
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd grad(n);
    double fx = f(x, grad);
    if (!std::isfinite(fx) || !all_finite(grad)) {
        throw std::runtime_error("optimizer: non-finite objective or gradient at start");
    }

    struct Pair { Eigen::VectorXd s, y; double rho; };
    std::deque<Pair> history;

    OptimResult result;
    result.objective_trace.push_back(fx);

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        double gnorm = grad.norm();
        if (gnorm <= options.gradient_tol) {
            result.converged = true;
            break;
        }

        // Two-loop recursion.
        Eigen::VectorXd q = grad;
        std::vector<double> alpha(history.size());
        for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
            alpha[i] = history[i].rho * history[i].s.dot(q);
            q -= alpha[i] * history[i].y;
        }
        if (!history.empty()) {
            const auto& last = history.back();
            double gamma = last.s.dot(last.y) / last.y.squaredNorm();
            q *= gamma;
        }
        for (size_t i = 0; i < history.size(); ++i) {
            double beta = history[i].rho * history[i].y.dot(q);
            q += (alpha[i] - beta) * history[i].s;
        }
        Eigen::VectorXd direction = -q;

        double descent = grad.dot(direction);
        if (!(descent < 0.0)) {
            direction = -grad;
            descent = -gnorm * gnorm;
        }

        // Armijo backtracking.
        double step = (iter == 0 && history.empty()) ? 1.0 / std::max(1.0, gnorm) : 1.0;
        const double c1 = 1e-4;
        Eigen::VectorXd x_new(n), grad_new(n);
        double fx_new = fx;
        bool accepted = false;
        for (int ls = 0; ls < 64; ++ls) {
            x_new = x + step * direction;
            fx_new = f(x_new, grad_new);
            if (std::isfinite(fx_new) && all_finite(grad_new) &&
                fx_new <= fx + c1 * step * descent) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || !(fx_new < fx)) {
            // No representable decrease; stationary to machine precision.
            result.converged = true;
            break;
        }

        Eigen::VectorXd s = x_new - x;
        Eigen::VectorXd y = grad_new - grad;
        double sy = s.dot(y);
        if (sy > 1e-16) {
            history.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(history.size()) > options.memory) {
                history.pop_front();
            }
        }

        x = std::move(x_new);
        grad = std::move(grad_new);
        fx = fx_new;
        result.objective_trace.push_back(fx);
    }
    if (iter == options.max_iterations) {
        // Iteration budget exhausted counts as declared convergence.
        result.converged = true;
    }

    result.x = std::move(x);
    result.objective = fx;
    result.gradient_norm = grad.norm();
    result.iterations = iter;
    return result;
}

} // namespace aquacast
