#include "aquacast/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace aquacast {

namespace {

double matern52(double r) {
    double s = std::sqrt(5.0) * r;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& length_scales,
                              double signal_var) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = signal_var;
        for (Eigen::Index j = 0; j < i; ++j) {
            double r2 = 0.0;
            for (Eigen::Index d = 0; d < X.cols(); ++d) {
                double diff = (X(i, d) - X(j, d)) / length_scales[d];
                r2 += diff * diff;
            }
            double v = signal_var * matern52(std::sqrt(r2));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

struct Likelihood {
    double value;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd alpha;
    bool ok;
};

Likelihood evaluate(const Eigen::MatrixXd& X, const Eigen::VectorXd& centered_y,
                    const Eigen::VectorXd& length_scales, double signal_var,
                    double noise_var) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K = kernel_matrix(X, length_scales, signal_var);
    K.diagonal().array() += noise_var;

    double jitter = 1e-10;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (int attempt = 0; attempt < 8; ++attempt) {
        llt.compute(K);
        if (llt.info() == Eigen::Success) break;
        K.diagonal().array() += jitter;
        jitter *= 10.0;
    }
    if (llt.info() != Eigen::Success) {
        return {-std::numeric_limits<double>::infinity(), {}, {}, false};
    }
    Eigen::VectorXd alpha = llt.solve(centered_y);
    double log_det = 0.0;
    const auto& L = llt.matrixLLT();
    for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(L(i, i));
    double lml = -0.5 * centered_y.dot(alpha) - log_det -
                 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    if (!std::isfinite(lml)) {
        return {-std::numeric_limits<double>::infinity(), {}, {}, false};
    }
    return {lml, std::move(llt), std::move(alpha), true};
}

/// Minimal Nelder-Mead; deterministic given the starting simplex.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& start, double spread,
                            int max_evals) {
    const Eigen::Index n = start.size();
    std::vector<Eigen::VectorXd> pts;
    std::vector<double> vals;
    pts.push_back(start);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd p = start;
        p[i] += spread;
        pts.push_back(p);
    }
    for (const auto& p : pts) vals.push_back(f(p));
    int evals = static_cast<int>(pts.size());

    auto order = [&]() {
        for (size_t i = 1; i < pts.size(); ++i) {
            auto p = pts[i];
            auto v = vals[i];
            size_t j = i;
            while (j > 0 && vals[j - 1] > v) {
                pts[j] = pts[j - 1];
                vals[j] = vals[j - 1];
                --j;
            }
            pts[j] = p;
            vals[j] = v;
        }
    };
    order();

    while (evals < max_evals) {
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (size_t i = 0; i + 1 < pts.size(); ++i) centroid += pts[i];
        centroid /= static_cast<double>(n);

        Eigen::VectorXd reflected = centroid + (centroid - pts.back());
        double fr = f(reflected);
        ++evals;
        if (fr < vals[0]) {
            Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts.back());
            double fe = f(expanded);
            ++evals;
            if (fe < fr) {
                pts.back() = expanded;
                vals.back() = fe;
            } else {
                pts.back() = reflected;
                vals.back() = fr;
            }
        } else if (fr < vals[vals.size() - 2]) {
            pts.back() = reflected;
            vals.back() = fr;
        } else {
            Eigen::VectorXd contracted = centroid + 0.5 * (pts.back() - centroid);
            double fc = f(contracted);
            ++evals;
            if (fc < vals.back()) {
                pts.back() = contracted;
                vals.back() = fc;
            } else {
                for (size_t i = 1; i < pts.size(); ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    vals[i] = f(pts[i]);
                    ++evals;
                }
            }
        }
        order();
        if (std::abs(vals.back() - vals[0]) < 1e-10) break;
    }
    return pts[0];
}

} // namespace

GaussianProcess GaussianProcess::fit(Eigen::MatrixXd X, Eigen::VectorXd y,
                                     std::uint64_t seed, int restarts,
                                     double noise_floor) {
    if (X.rows() != y.size()) {
        throw std::invalid_argument("GP: X/y size mismatch");
    }
    if (X.rows() < 2) {
        throw std::invalid_argument("GP: need at least 2 observations");
    }
    bool all_identical = true;
    for (Eigen::Index i = 1; i < X.rows() && all_identical; ++i) {
        if ((X.row(i) - X.row(0)).norm() > 0.0) all_identical = false;
    }
    if (all_identical) {
        throw std::invalid_argument("GP: all design points identical");
    }

    GaussianProcess gp;
    gp.X_ = std::move(X);
    gp.y_ = std::move(y);
    gp.y_mean_ = gp.y_.mean();
    Eigen::VectorXd centered = gp.y_.array() - gp.y_mean_;
    double y_var = std::max(1e-12, centered.squaredNorm() /
                                       static_cast<double>(centered.size()));

    const Eigen::Index d = gp.X_.cols();
    // theta = [log length scales (d), log signal var, log noise var]
    auto objective = [&](const Eigen::VectorXd& theta) {
        Eigen::VectorXd ls = theta.head(d).array().exp();
        double sv = std::exp(theta[d]);
        double nv = std::max(noise_floor, std::exp(theta[d + 1]));
        if ((ls.array() < 1e-6).any() || (ls.array() > 1e6).any() || sv > 1e8) {
            return std::numeric_limits<double>::infinity();
        }
        auto like = evaluate(gp.X_, centered, ls, sv, nv);
        return like.ok ? -like.value : std::numeric_limits<double>::infinity();
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);

    Eigen::VectorXd best_theta(d + 2);
    double best_value = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < std::max(1, restarts); ++restart) {
        Eigen::VectorXd theta(d + 2);
        if (restart == 0) {
            theta.head(d).setConstant(std::log(0.5));
            theta[d] = std::log(y_var);
            theta[d + 1] = std::log(std::max(noise_floor, 1e-4 * y_var));
        } else {
            for (Eigen::Index i = 0; i < d; ++i) theta[i] = std::log(0.5) + unif(rng);
            theta[d] = std::log(y_var) + unif(rng);
            theta[d + 1] = std::log(std::max(noise_floor, 1e-4 * y_var)) + unif(rng);
        }
        Eigen::VectorXd solution = nelder_mead(objective, theta, 0.5, 200);
        double value = objective(solution);
        if (value < best_value) {
            best_value = value;
            best_theta = solution;
        }
    }
    if (!std::isfinite(best_value)) {
        throw std::runtime_error("GP: marginal likelihood optimization failed");
    }

    gp.length_scales_ = best_theta.head(d).array().exp();
    gp.signal_var_ = std::exp(best_theta[d]);
    gp.noise_var_ = std::max(noise_floor, std::exp(best_theta[d + 1]));
    auto like = evaluate(gp.X_, centered, gp.length_scales_, gp.signal_var_,
                         gp.noise_var_);
    if (!like.ok) {
        throw std::runtime_error("GP: kernel matrix not positive definite");
    }
    gp.chol_lower_ = like.llt.matrixL();
    gp.alpha_ = like.alpha;
    gp.lml_ = like.value;
    return gp;
}

GaussianProcess::Prediction GaussianProcess::predict(const Eigen::VectorXd& x) const {
    const Eigen::Index n = X_.rows();
    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (Eigen::Index d = 0; d < X_.cols(); ++d) {
            double diff = (x[d] - X_(i, d)) / length_scales_[d];
            r2 += diff * diff;
        }
        k_star[i] = signal_var_ * matern52(std::sqrt(r2));
    }
    Prediction pred;
    pred.mean = y_mean_ + k_star.dot(alpha_);
    Eigen::VectorXd v =
        chol_lower_.triangularView<Eigen::Lower>().solve(k_star);
    pred.variance = std::max(0.0, signal_var_ - v.squaredNorm());
    return pred;
}

} // namespace aquacast
