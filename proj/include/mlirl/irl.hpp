#pragma once

#include "mlirl/demonstrations.hpp"
#include "mlirl/estimators.hpp"
#include "mlirl/features.hpp"
#include "mlirl/mdp.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace mlirl {

enum class Algorithm { GIRL, PM, MWAL };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct IrlConfig {
    Algorithm algorithm = Algorithm::GIRL;
    EstimatorKind estimator{};
    double temperature = 0.1;
    double step_size = 0.05;
    std::size_t n_iterations = 100;
    ConstraintMode constraint_mode = ConstraintMode::L1Sphere;
    std::uint64_t seed = 0;
    /// Halve the step and retry while the objective decreases (GIRL and PM).
    bool backtracking = false;
    ValueIterationOptions planning{};
};

/// The reward-less problem an IRL run sees.
struct IrlProblem {
    const TabularMdp& mdp;
    const FeatureMap& features;
    /// Environment declares costs only: start from negative weights, MWAL flips the game.
    bool costs_only = false;
};

struct IterationRecord {
    Vector theta;
    double loglik = 0.0;
    double similarity = 0.0;
    /// The algorithm's own objective (log L for GIRL, -J_PM for PM, J for MWAL).
    double objective = 0.0;
    double wall_ms = 0.0;
    /// Greedy actions of the policy the run would report if stopped here
    /// (best iterate so far for GIRL/PM, running mixture for MWAL).
    std::vector<Index> greedy_actions;
};

using IterationTrace = std::vector<IterationRecord>;

struct IrlResult {
    WeightVector final_weights;
    StochasticPolicy final_policy;
    StochasticPolicy final_greedy;
    IterationTrace trace;
    /// Iteration whose weights are reported (best objective for GIRL/PM, last for MWAL).
    std::size_t reported_iteration = 0;
    /// MWAL only: mean of the iterates' feature expectations under the initial distribution.
    Vector mixture_feature_expectations;
};

/// J = sum_{x,a} mu_E(x) pi_hat_E(a|x) log pi_theta(a|x).
double similarity_J(const EmpiricalStats& stats, const StochasticPolicy& boltzmann);

/// log L = sum_i log pi_theta(a_i | x_i).
double log_likelihood(const Demonstration& demo, const StochasticPolicy& boltzmann);

/// J_PM = sum_x mu_E(x) sum_a (pi_hat_E(a|x) - pi_theta(a|x))^2.
double policy_matching_cost(const EmpiricalStats& stats, const StochasticPolicy& boltzmann);

/// Gradient of -J_PM with the Boltzmann derivative dpi/dtheta_k = (pi/eta)(Psi_k - sum_b pi Psi_k).
Vector policy_matching_gradient(const EmpiricalStats& stats, const StochasticPolicy& boltzmann,
                                const QDerivative& q_deriv, const BoltzmannConfig& cfg);

/// Maximum-likelihood IRL: projected, normalized gradient ascent on log L.
IrlResult run_girl(const IrlProblem& problem, const EmpiricalStats& stats, const IrlConfig& cfg);

/// Policy matching: the same loop on the least-squares policy cost.
IrlResult run_pm(const IrlProblem& problem, const EmpiricalStats& stats, const IrlConfig& cfg);

/**
 * Multiplicative-weights apprenticeship learning. Feature expectations of each
 * iterate come from cfg.estimator; the returned policy is the state-wise uniform
 * mixture of the iterates' greedy policies. The reported weights are the final
 * adversarial weights, which are not a point estimate of the reward.
 */
IrlResult run_mwal(const IrlProblem& problem, const EmpiricalStats& stats,
                   const Demonstration& demo, const IrlConfig& cfg);

/// As above with the expert's discounted feature expectations given directly.
IrlResult run_mwal(const IrlProblem& problem, const EmpiricalStats& stats, const Vector& mu_expert,
                   const IrlConfig& cfg);

/// Dispatches on cfg.algorithm.
IrlResult run_irl(const IrlProblem& problem, const EmpiricalStats& stats,
                  const Demonstration& demo, const IrlConfig& cfg);

} // namespace mlirl
