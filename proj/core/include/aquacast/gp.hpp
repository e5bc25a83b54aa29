#ifndef AQUACAST_GP_HPP
#define AQUACAST_GP_HPP

#include <Eigen/Core>

#include <cstdint>

namespace aquacast {

/**
 * Gaussian-process regression with a Matern 5/2 kernel and per-dimension
 * length scales. Kernel hyperparameters (length scales, signal variance,
 * noise variance) are fit by maximizing the log marginal likelihood with
 * multi-start Nelder-Mead; all randomness is seeded.
 */
class GaussianProcess {
public:
    struct Prediction {
        double mean = 0.0;
        double variance = 0.0; // latent (noise-free) posterior variance
    };

    /// X: one row per observation (internal coordinates); y: objectives.
    static GaussianProcess fit(Eigen::MatrixXd X, Eigen::VectorXd y,
                               std::uint64_t seed, int restarts = 5,
                               double noise_floor = 1e-8);

    Prediction predict(const Eigen::VectorXd& x) const;

    double log_marginal_likelihood() const { return lml_; }
    const Eigen::VectorXd& length_scales() const { return length_scales_; }
    double signal_variance() const { return signal_var_; }
    double noise_variance() const { return noise_var_; }
    Eigen::Index n_points() const { return X_.rows(); }

private:
    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    double y_mean_ = 0.0;
    Eigen::VectorXd length_scales_;
    double signal_var_ = 1.0;
    double noise_var_ = 1e-6;
    Eigen::MatrixXd chol_lower_;
    Eigen::VectorXd alpha_;
    double lml_ = 0.0;
};

} // namespace aquacast

#endif
