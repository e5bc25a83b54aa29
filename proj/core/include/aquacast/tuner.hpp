#ifndef AQUACAST_TUNER_HPP
#define AQUACAST_TUNER_HPP

#include "aquacast/gp.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace aquacast {

struct Dimension {
    enum class Type { UniformInt, UniformReal, LogUniformReal, Categorical };
    std::string name;
    Type type = Type::UniformReal;
    double low = 0.0;
    double high = 0.0;
    std::vector<std::string> choices; // Categorical only
};

using ParamValue = std::variant<long, double, std::string>;
using Assignment = std::vector<ParamValue>; // one entry per dimension

struct SearchSpace {
    std::vector<Dimension> dims;

    void validate() const; // throws std::invalid_argument
    int dim_index(const std::string& name) const; // throws if unknown
};

std::string param_value_to_string(const ParamValue& value);

/// Draw one assignment: integers uniform inclusive, log-uniform in log
/// space, categoricals uniform over labels.
Assignment sample_space(const SearchSpace& space, std::mt19937_64& rng);

/// Internal GP coordinates: [0,1]-scaled per numeric dimension (log
/// scale for log-uniform), one-hot for categoricals.
Eigen::VectorXd to_internal(const SearchSpace& space, const Assignment& assignment);
Eigen::Index internal_dim(const SearchSpace& space);

struct TrialRecord {
    Assignment assignment;
    double objective = 0.0;  // mean CV test MAPE, percent
    double mape_std = 0.0;
    double mae_mean = 0.0;
    size_t iteration = 0;
    double seconds = 0.0;
    bool failed = false;
};

struct SurrogateState {
    SearchSpace space;
    GaussianProcess gp;
    Eigen::MatrixXd design; // internal coordinates, non-failed trials only
    Eigen::VectorXd objectives;
};

/// GP surrogate over the non-failed trials; needs at least 2 of them.
SurrogateState fit_surrogate(const SearchSpace& space,
                             const std::vector<TrialRecord>& trials,
                             std::uint64_t seed = 0,
                             double noise_floor = 1e-8);

double surrogate_mean(const SurrogateState& surrogate, const Assignment& assignment);

/**
 * Expected-improvement maximization over `n_candidates` space samples;
 * ties broken by first index. Deterministic given the rng state.
 */
Assignment suggest_next(const SurrogateState& surrogate, const SearchSpace& space,
                        std::mt19937_64& rng, int n_candidates = 1000);

struct TrialOutcome {
    bool ok = false;
    double mape_mean = 0.0;
    double mape_std = 0.0;
    double mae_mean = 0.0;
};

using TrialObjective = std::function<TrialOutcome(const Assignment&)>;

struct SearchResult {
    std::vector<TrialRecord> history;
    Assignment best;
    double best_objective = 0.0;
};

/**
 * Bayesian optimization loop: the first max(5, n/10) iterations sample
 * the space at random, the rest follow the surrogate. Failed trials get
 * a penalty objective (2x the worst observed) and never train the
 * surrogate. Throws if every iteration failed.
 */
SearchResult run_search(const TrialObjective& objective, const SearchSpace& space,
                        int n_iterations, std::uint64_t seed);

struct PdpGrid {
    std::string dim1;
    std::string dim2;              // empty for 1-D grids
    std::vector<std::string> x1;   // coordinate labels per row
    std::vector<std::string> x2;   // empty strings for 1-D grids
    std::vector<double> x1_numeric; // NaN for categorical coordinates
    std::vector<double> x2_numeric;
    std::vector<double> values;
};

/**
 * Partial dependence of the surrogate mean on one dimension or a pair:
 * each grid value averages the posterior mean over `n_background`
 * samples of the remaining dimensions (one shared background set).
 */
PdpGrid partial_dependence(const SurrogateState& surrogate, const SearchSpace& space,
                           const std::vector<std::string>& dim_names,
                           int grid_size = 40, int n_background = 250,
                           std::uint64_t seed = 0);

/// Space definition JSON: list of {name, type, low, high | choices}.
SearchSpace load_search_space(std::istream& in);
void write_search_space(const SearchSpace& space, std::ostream& out);

} // namespace aquacast

#endif
