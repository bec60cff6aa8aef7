#pragma once

#include "mlirl/mdp.hpp"

#include <string_view>
#include <vector>

namespace mlirl {

/**
 * Per-(state, action) feature vectors phi(x, a) defining the linear reward
 * family R_theta = sum_k theta_k phi_k.
 *
 * Stored densely as a (state * action) x feature matrix; row `x * n_actions + a`
 * is phi(x, a).
 */
class FeatureMap {
public:
    FeatureMap(Index n_states, Index n_actions, Matrix values);

    Index n_states() const noexcept { return n_states_; }
    Index n_actions() const noexcept { return n_actions_; }
    Index n_features() const noexcept { return values_.cols(); }
    const Matrix& values() const noexcept { return values_; }

    double operator()(Index state, Index action, Index feature) const {
        return values_(state * n_actions_ + action, feature);
    }

private:
    Index n_states_;
    Index n_actions_;
    Matrix values_;
};

enum class ConstraintMode { L1Sphere, NonnegSimplex, Unconstrained };

std::string_view to_string(ConstraintMode mode);
ConstraintMode parse_constraint_mode(std::string_view name);

/// Reward weights theta together with the constraint they satisfy.
class WeightVector {
public:
    /// Throws InvariantError if theta violates `mode`.
    WeightVector(Vector theta, ConstraintMode mode);

    const Vector& theta() const noexcept { return theta_; }
    ConstraintMode mode() const noexcept { return mode_; }
    Index size() const noexcept { return theta_.size(); }

private:
    Vector theta_;
    ConstraintMode mode_;
};

void check_dimensions(const TabularMdp& mdp, const FeatureMap& features);

RewardTable assemble_reward(const FeatureMap& features, const Vector& theta);
RewardTable assemble_reward(const FeatureMap& features, const WeightVector& w);

/// phi_i(x, a) = 1 iff cell_of[x] == i, independent of the action.
FeatureMap indicator_features(Index n_states, Index n_actions, const std::vector<Index>& cell_of,
                              Index n_cells);

/**
 * Maps raw weights onto the constraint set.
 *  - L1Sphere: theta / |theta|_1 (throws ConfigError on the zero vector)
 *  - NonnegSimplex: Euclidean projection onto the probability simplex
 *  - Unconstrained: identity
 */
WeightVector project_weights(const Vector& theta_raw, ConstraintMode mode);

/// Euclidean projection onto {w >= 0, sum w = 1} by sorting and thresholding.
Vector project_to_simplex(const Vector& v);

/// Uniform starting weights 1/N (negated when the environment only has costs).
WeightVector initial_weights(Index n_features, ConstraintMode mode, bool costs_only);

} // namespace mlirl
