#include "mlirl/features.hpp"

#include "mlirl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace mlirl {

FeatureMap::FeatureMap(Index n_states, Index n_actions, Matrix values)
    : n_states_(n_states), n_actions_(n_actions), values_(std::move(values)) {
    if (n_states <= 0 || n_actions <= 0) throw InvariantError("FeatureMap: empty state/action set");
    if (values_.rows() != n_states * n_actions) {
        throw DimensionError("FeatureMap: expected " + std::to_string(n_states * n_actions) +
                             " rows, got " + std::to_string(values_.rows()));
    }
    if (values_.cols() < 1) throw InvariantError("FeatureMap: need at least one feature");
    if (!values_.allFinite()) throw InvariantError("FeatureMap: non-finite feature value");
}

std::string_view to_string(ConstraintMode mode) {
    switch (mode) {
    case ConstraintMode::L1Sphere: return "l1";
    case ConstraintMode::NonnegSimplex: return "simplex";
    case ConstraintMode::Unconstrained: return "none";
    }
    return "?";
}

ConstraintMode parse_constraint_mode(std::string_view name) {
    if (name == "l1" || name == "L1_SPHERE") return ConstraintMode::L1Sphere;
    if (name == "simplex" || name == "NONNEG_SIMPLEX") return ConstraintMode::NonnegSimplex;
    if (name == "none" || name == "UNCONSTRAINED") return ConstraintMode::Unconstrained;
    throw ConfigError("unknown constraint mode '" + std::string(name) + "'");
}

WeightVector::WeightVector(Vector theta, ConstraintMode mode) : theta_(std::move(theta)), mode_(mode) {
    if (theta_.size() == 0 || !theta_.allFinite()) {
        throw InvariantError("WeightVector: empty or non-finite weights");
    }
    if (mode_ != ConstraintMode::Unconstrained && std::abs(theta_.lpNorm<1>() - 1.0) > 1e-10) {
        throw InvariantError("WeightVector: |theta|_1 must equal 1");
    }
    if (mode_ == ConstraintMode::NonnegSimplex && (theta_.array() < 0.0).any()) {
        throw InvariantError("WeightVector: negative weight under the simplex constraint");
    }
}

void check_dimensions(const TabularMdp& mdp, const FeatureMap& features) {
    if (features.n_states() != mdp.n_states() || features.n_actions() != mdp.n_actions()) {
        throw DimensionError("feature map shape does not match the MDP");
    }
}

RewardTable assemble_reward(const FeatureMap& features, const Vector& theta) {
    if (theta.size() != features.n_features()) {
        throw DimensionError("assemble_reward: weight length does not match feature count");
    }
    const Vector flat = features.values() * theta;
    Matrix r(features.n_states(), features.n_actions());
    for (Index x = 0; x < r.rows(); ++x) {
        r.row(x) = flat.segment(x * r.cols(), r.cols()).transpose();
    }
    return RewardTable{std::move(r)};
}

RewardTable assemble_reward(const FeatureMap& features, const WeightVector& w) {
    return assemble_reward(features, w.theta());
}

FeatureMap indicator_features(Index n_states, Index n_actions, const std::vector<Index>& cell_of,
                              Index n_cells) {
    if (static_cast<Index>(cell_of.size()) != n_states) {
        throw DimensionError("indicator_features: cell map length differs from state count");
    }
    if (n_cells <= 0) throw ConfigError("indicator_features: need at least one cell");
    Matrix values = Matrix::Zero(n_states * n_actions, n_cells);
    for (Index x = 0; x < n_states; ++x) {
        const Index cell = cell_of[static_cast<std::size_t>(x)];
        if (cell < 0 || cell >= n_cells) {
            throw DimensionError("indicator_features: cell index out of range for state " +
                                 std::to_string(x));
        }
        for (Index a = 0; a < n_actions; ++a) values(x * n_actions + a, cell) = 1.0;
    }
    return FeatureMap(n_states, n_actions, std::move(values));
}

Vector project_to_simplex(const Vector& v) {
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double threshold = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - candidate > 0.0) threshold = candidate;
    }
    Vector out = (v.array() - threshold).max(0.0).matrix();
    // Renormalize away the rounding left by the threshold.
    return out / out.sum();
}

WeightVector project_weights(const Vector& theta_raw, ConstraintMode mode) {
    if (theta_raw.size() == 0 || !theta_raw.allFinite()) {
        throw ConfigError("project_weights: empty or non-finite input");
    }
    switch (mode) {
    case ConstraintMode::L1Sphere: {
        const double norm = theta_raw.lpNorm<1>();
        if (norm == 0.0) throw ConfigError("project_weights: cannot normalize the zero vector");
        return WeightVector(theta_raw / norm, mode);
    }
    case ConstraintMode::NonnegSimplex:
        return WeightVector(project_to_simplex(theta_raw), mode);
    case ConstraintMode::Unconstrained:
        return WeightVector(theta_raw, mode);
    }
    throw ConfigError("project_weights: unknown mode");
}

WeightVector initial_weights(Index n_features, ConstraintMode mode, bool costs_only) {
    if (n_features <= 0) throw ConfigError("initial_weights: need at least one feature");
    const double sign = (costs_only && mode != ConstraintMode::NonnegSimplex) ? -1.0 : 1.0;
    return WeightVector(Vector::Constant(n_features, sign / static_cast<double>(n_features)), mode);
}

} // namespace mlirl
