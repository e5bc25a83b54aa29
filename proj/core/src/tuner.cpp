#include "aquacast/tuner.hpp"
#include "aquacast/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace aquacast {

namespace {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

} // namespace

void SearchSpace::validate() const {
    if (dims.empty()) {
        throw std::invalid_argument("search space has no dimensions");
    }
    std::vector<std::string> names;
    for (const auto& dim : dims) {
        if (dim.name.empty()) {
            throw std::invalid_argument("dimension name must be non-empty");
        }
        if (std::find(names.begin(), names.end(), dim.name) != names.end()) {
            throw std::invalid_argument("duplicate dimension name '" + dim.name + "'");
        }
        names.push_back(dim.name);
        switch (dim.type) {
        case Dimension::Type::Categorical:
            if (dim.choices.size() < 2) {
                throw std::invalid_argument("categorical dimension '" + dim.name +
                                            "' needs at least 2 choices");
            }
            break;
        case Dimension::Type::LogUniformReal:
            if (!(dim.low > 0.0)) {
                throw std::invalid_argument("log-uniform dimension '" + dim.name +
                                            "' requires low > 0");
            }
            [[fallthrough]];
        case Dimension::Type::UniformInt:
        case Dimension::Type::UniformReal:
            if (!(dim.low < dim.high)) {
                throw std::invalid_argument("dimension '" + dim.name +
                                            "' requires low < high");
            }
            break;
        }
    }
}

int SearchSpace::dim_index(const std::string& name) const {
    for (size_t i = 0; i < dims.size(); ++i) {
        if (dims[i].name == name) return static_cast<int>(i);
    }
    throw std::invalid_argument("unknown dimension '" + name + "'");
}

std::string param_value_to_string(const ParamValue& value) {
    if (std::holds_alternative<long>(value)) {
        return std::to_string(std::get<long>(value));
    }
    if (std::holds_alternative<double>(value)) {
        return format_double(std::get<double>(value));
    }
    return std::get<std::string>(value);
}

Assignment sample_space(const SearchSpace& space, std::mt19937_64& rng) {
    Assignment out;
    out.reserve(space.dims.size());
    for (const auto& dim : space.dims) {
        switch (dim.type) {
        case Dimension::Type::UniformInt: {
            std::uniform_int_distribution<long> dist(static_cast<long>(dim.low),
                                                     static_cast<long>(dim.high));
            out.emplace_back(dist(rng));
            break;
        }
        case Dimension::Type::UniformReal: {
            std::uniform_real_distribution<double> dist(dim.low, dim.high);
            out.emplace_back(dist(rng));
            break;
        }
        case Dimension::Type::LogUniformReal: {
            std::uniform_real_distribution<double> dist(std::log(dim.low),
                                                        std::log(dim.high));
            out.emplace_back(std::exp(dist(rng)));
            break;
        }
        case Dimension::Type::Categorical: {
            std::uniform_int_distribution<size_t> dist(0, dim.choices.size() - 1);
            out.emplace_back(dim.choices[dist(rng)]);
            break;
        }
        }
    }
    return out;
}

Eigen::Index internal_dim(const SearchSpace& space) {
    Eigen::Index total = 0;
    for (const auto& dim : space.dims) {
        total += dim.type == Dimension::Type::Categorical
                     ? static_cast<Eigen::Index>(dim.choices.size())
                     : 1;
    }
    return total;
}

Eigen::VectorXd to_internal(const SearchSpace& space, const Assignment& assignment) {
    if (assignment.size() != space.dims.size()) {
        throw std::invalid_argument("assignment size does not match search space");
    }
    Eigen::VectorXd coords(internal_dim(space));
    Eigen::Index pos = 0;
    for (size_t i = 0; i < space.dims.size(); ++i) {
        const auto& dim = space.dims[i];
        const auto& value = assignment[i];
        switch (dim.type) {
        case Dimension::Type::UniformInt: {
            double v = static_cast<double>(std::get<long>(value));
            coords[pos++] = (v - dim.low) / (dim.high - dim.low);
            break;
        }
        case Dimension::Type::UniformReal: {
            coords[pos++] = (std::get<double>(value) - dim.low) / (dim.high - dim.low);
            break;
        }
        case Dimension::Type::LogUniformReal: {
            double lo = std::log(dim.low), hi = std::log(dim.high);
            coords[pos++] = (std::log(std::get<double>(value)) - lo) / (hi - lo);
            break;
        }
        case Dimension::Type::Categorical: {
            const auto& label = std::get<std::string>(value);
            auto it = std::find(dim.choices.begin(), dim.choices.end(), label);
            if (it == dim.choices.end()) {
                throw std::invalid_argument("label '" + label +
                                            "' not in dimension '" + dim.name + "'");
            }
            for (size_t c = 0; c < dim.choices.size(); ++c) {
                coords[pos++] = (static_cast<size_t>(it - dim.choices.begin()) == c)
                                    ? 1.0
                                    : 0.0;
            }
            break;
        }
        }
    }
    return coords;
}

SurrogateState fit_surrogate(const SearchSpace& space,
                             const std::vector<TrialRecord>& trials,
                             std::uint64_t seed, double noise_floor) {
    space.validate();
    std::vector<const TrialRecord*> usable;
    for (const auto& t : trials) {
        if (!t.failed) usable.push_back(&t);
    }
    if (usable.size() < 2) {
        throw std::invalid_argument("fit_surrogate: need at least 2 non-failed trials");
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(usable.size()), internal_dim(space));
    Eigen::VectorXd y(static_cast<Eigen::Index>(usable.size()));
    for (size_t i = 0; i < usable.size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) = to_internal(space, usable[i]->assignment);
        y[static_cast<Eigen::Index>(i)] = usable[i]->objective;
    }
    SurrogateState state{space, GaussianProcess::fit(X, y, seed, 5, noise_floor), X, y};
    return state;
}

double surrogate_mean(const SurrogateState& surrogate, const Assignment& assignment) {
    return surrogate.gp.predict(to_internal(surrogate.space, assignment)).mean;
}

Assignment suggest_next(const SurrogateState& surrogate, const SearchSpace& space,
                        std::mt19937_64& rng, int n_candidates) {
    double best_observed = surrogate.objectives.minCoeff();
    Assignment best_candidate;
    double best_ei = -1.0;
    for (int c = 0; c < n_candidates; ++c) {
        Assignment candidate = sample_space(space, rng);
        auto pred = surrogate.gp.predict(to_internal(space, candidate));
        double sd = std::sqrt(std::max(0.0, pred.variance));
        double ei = 0.0;
        if (sd > 0.0) {
            double z = (best_observed - pred.mean) / sd;
            ei = (best_observed - pred.mean) * normal_cdf(z) + sd * normal_pdf(z);
        } else {
            ei = std::max(0.0, best_observed - pred.mean);
        }
        if (ei > best_ei) {
            best_ei = ei;
            best_candidate = std::move(candidate);
        }
    }
    return best_candidate;
}

SearchResult run_search(const TrialObjective& objective, const SearchSpace& space,
                        int n_iterations, std::uint64_t seed) {
    space.validate();
    if (n_iterations < 5) {
        throw std::invalid_argument("run_search: need at least 5 iterations");
    }
    const int n_random = std::max(5, n_iterations / 10);

    std::mt19937_64 rng(seed);
    SearchResult result;
    result.best_objective = std::numeric_limits<double>::infinity();
    double worst_objective = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < n_iterations; ++iter) {
        Assignment assignment;
        bool can_guide = false;
        if (iter >= n_random) {
            size_t usable = 0;
            for (const auto& t : result.history) {
                if (!t.failed) ++usable;
            }
            can_guide = usable >= 2;
        }
        if (can_guide) {
            auto surrogate = fit_surrogate(space, result.history, seed);
            assignment = suggest_next(surrogate, space, rng);
        } else {
            assignment = sample_space(space, rng);
        }

        TrialOutcome outcome = objective(assignment);
        TrialRecord record;
        record.assignment = std::move(assignment);
        record.iteration = static_cast<size_t>(iter);
        record.failed = !outcome.ok;
        if (outcome.ok) {
            record.objective = outcome.mape_mean;
            record.mape_std = outcome.mape_std;
            record.mae_mean = outcome.mae_mean;
            worst_objective = std::max(worst_objective, record.objective);
            if (record.objective < result.best_objective) {
                result.best_objective = record.objective;
                result.best = record.assignment;
            }
        } else {
            // Penalty keeps the history well-defined without training the
            // surrogate on a fabricated value.
            record.objective = std::isfinite(worst_objective)
                                   ? 2.0 * worst_objective
                                   : std::numeric_limits<double>::quiet_NaN();
        }
        result.history.push_back(std::move(record));
    }
    if (!std::isfinite(result.best_objective)) {
        throw std::runtime_error("run_search: every iteration failed");
    }
    // Backfill penalties for failures that happened before any success.
    for (auto& record : result.history) {
        if (record.failed && !std::isfinite(record.objective)) {
            record.objective = 2.0 * worst_objective;
        }
    }
    return result;
}

PdpGrid partial_dependence(const SurrogateState& surrogate, const SearchSpace& space,
                           const std::vector<std::string>& dim_names,
                           int grid_size, int n_background, std::uint64_t seed) {
    if (dim_names.empty() || dim_names.size() > 2) {
        throw std::invalid_argument("partial_dependence: one or two dimensions");
    }
    std::vector<int> dim_ids;
    for (const auto& name : dim_names) dim_ids.push_back(space.dim_index(name));

    // Grid coordinates per chosen dimension; endpoints included exactly.
    auto make_grid = [&](int id) {
        const auto& dim = space.dims[static_cast<size_t>(id)];
        std::vector<ParamValue> grid;
        switch (dim.type) {
        case Dimension::Type::Categorical:
            for (const auto& c : dim.choices) grid.emplace_back(c);
            break;
        case Dimension::Type::UniformInt: {
            long lo = static_cast<long>(dim.low), hi = static_cast<long>(dim.high);
            long count = std::min<long>(grid_size, hi - lo + 1);
            for (long i = 0; i < count; ++i) {
                long v = lo + (hi - lo) * i / std::max<long>(1, count - 1);
                if (grid.empty() || std::get<long>(grid.back()) != v) {
                    grid.emplace_back(v);
                }
            }
            break;
        }
        case Dimension::Type::UniformReal:
            for (int i = 0; i < grid_size; ++i) {
                double f = static_cast<double>(i) / (grid_size - 1);
                grid.emplace_back(dim.low + f * (dim.high - dim.low));
            }
            break;
        case Dimension::Type::LogUniformReal:
            for (int i = 0; i < grid_size; ++i) {
                double f = static_cast<double>(i) / (grid_size - 1);
                grid.emplace_back(std::exp(std::log(dim.low) +
                                           f * (std::log(dim.high) - std::log(dim.low))));
            }
            break;
        }
        return grid;
    };

    std::mt19937_64 rng(seed);
    std::vector<Assignment> background;
    background.reserve(static_cast<size_t>(n_background));
    for (int i = 0; i < n_background; ++i) {
        background.push_back(sample_space(space, rng));
    }

    auto coord_numeric = [](const ParamValue& v) {
        if (std::holds_alternative<long>(v)) {
            return static_cast<double>(std::get<long>(v));
        }
        if (std::holds_alternative<double>(v)) return std::get<double>(v);
        return std::numeric_limits<double>::quiet_NaN();
    };

    PdpGrid out;
    out.dim1 = dim_names[0];
    out.dim2 = dim_names.size() == 2 ? dim_names[1] : "";

    auto evaluate_point = [&](const std::vector<std::pair<int, ParamValue>>& fixed) {
        double sum = 0.0;
        Assignment scratch;
        for (const auto& bg : background) {
            scratch = bg;
            for (const auto& [id, value] : fixed) {
                scratch[static_cast<size_t>(id)] = value;
            }
            sum += surrogate.gp.predict(to_internal(space, scratch)).mean;
        }
        return sum / static_cast<double>(background.size());
    };

    auto grid1 = make_grid(dim_ids[0]);
    if (dim_ids.size() == 1) {
        for (const auto& g : grid1) {
            out.x1.push_back(param_value_to_string(g));
            out.x2.emplace_back();
            out.x1_numeric.push_back(coord_numeric(g));
            out.x2_numeric.push_back(std::numeric_limits<double>::quiet_NaN());
            out.values.push_back(evaluate_point({{dim_ids[0], g}}));
        }
    } else {
        auto grid2 = make_grid(dim_ids[1]);
        for (const auto& g1 : grid1) {
            for (const auto& g2 : grid2) {
                out.x1.push_back(param_value_to_string(g1));
                out.x2.push_back(param_value_to_string(g2));
                out.x1_numeric.push_back(coord_numeric(g1));
                out.x2_numeric.push_back(coord_numeric(g2));
                out.values.push_back(
                    evaluate_point({{dim_ids[0], g1}, {dim_ids[1], g2}}));
            }
        }
    }
    return out;
}

namespace {

std::string type_to_string(Dimension::Type type) {
    switch (type) {
    case Dimension::Type::UniformInt: return "uniform_int";
    case Dimension::Type::UniformReal: return "uniform_real";
    case Dimension::Type::LogUniformReal: return "log_uniform";
    case Dimension::Type::Categorical: return "categorical";
    }
    return "";
}

Dimension::Type type_from_string(const std::string& text) {
    if (text == "uniform_int") return Dimension::Type::UniformInt;
    if (text == "uniform_real") return Dimension::Type::UniformReal;
    if (text == "log_uniform") return Dimension::Type::LogUniformReal;
    if (text == "categorical") return Dimension::Type::Categorical;
    throw std::runtime_error("search space: unknown dimension type '" + text + "'");
}

} // namespace

SearchSpace load_search_space(std::istream& in) {
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_array()) {
        throw std::runtime_error("search space JSON must be an array of dimensions");
    }
    SearchSpace space;
    for (const auto& item : doc) {
        Dimension dim;
        dim.name = item.at("name").get<std::string>();
        dim.type = type_from_string(item.at("type").get<std::string>());
        if (dim.type == Dimension::Type::Categorical) {
            dim.choices = item.at("choices").get<std::vector<std::string>>();
        } else {
            dim.low = item.at("low").get<double>();
            dim.high = item.at("high").get<double>();
        }
        space.dims.push_back(std::move(dim));
    }
    space.validate();
    return space;
}

void write_search_space(const SearchSpace& space, std::ostream& out) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& dim : space.dims) {
        nlohmann::json item;
        item["name"] = dim.name;
        item["type"] = type_to_string(dim.type);
        if (dim.type == Dimension::Type::Categorical) {
            item["choices"] = dim.choices;
        } else {
            item["low"] = dim.low;
            item["high"] = dim.high;
        }
        doc.push_back(std::move(item));
    }
    out << doc.dump(2) << '\n';
}

} // namespace aquacast
