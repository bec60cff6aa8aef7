#pragma once

// Reference computations used to check the library. Everything here is written
// against plain dense matrices and avoids the library's solvers, so a bug in one
// cannot hide the same bug in the other.

#include "mlirl/demonstrations.hpp"
#include "mlirl/features.hpp"
#include "mlirl/mdp.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace mlirl::oracle {

/// Dense random MDP: every (x,a) row gets Dirichlet-like weights over all successors.
TabularMdp random_mdp(Index n_states, Index n_actions, double discount, std::uint64_t seed);

/// Features drawn uniformly from [0, 1).
FeatureMap random_features(Index n_states, Index n_actions, Index n_features, std::uint64_t seed);

/// Random vector with ||v||_1 = 1 and entries of either sign.
Vector random_l1_weights(Index n, std::uint64_t seed);

/// Random (state, action) pairs, for likelihood checks that need no dynamics.
Demonstration random_pairs(Index n_states, Index n_actions, std::size_t m, std::uint64_t seed);

/// P(.|x,a) for each action as an |X| x |X| dense matrix.
std::vector<Matrix> dense_transitions(const TabularMdp& mdp);

/// Argmax per row, lowest index among entries within `tie_tol` of the maximum.
std::vector<Index> argmax_rows(const Matrix& q, double tie_tol = 1e-10);

Matrix softmax_rows(const Matrix& q, double temperature);

/// V^pi by full-pivot LU on (I - gamma P_pi) V = R_pi. `policy` is |X| x |A|.
Vector exact_policy_value(const TabularMdp& mdp, const Matrix& reward, const Matrix& policy);

/// Q* by policy iteration to a stable policy; Q is |X| x |A|.
Matrix exact_optimal_q(const TabularMdp& mdp, const Matrix& reward);

/// Feature expectations of pi from the lifted state-action system
/// (I - gamma P Pi) psi = phi, solved directly. Rows x*|A|+a.
Matrix exact_feature_expectations(const TabularMdp& mdp, const FeatureMap& features, const Matrix& policy);

/// Monte-Carlo discounted sums: for each (x,a), `rollouts` episodes that take a
/// first, then follow `policy`, truncated after `horizon` steps. Rows x*|A|+a.
Matrix monte_carlo_feature_expectations(const TabularMdp& mdp, const FeatureMap& features,
                                        const Matrix& policy, std::size_t rollouts,
                                        std::size_t horizon, std::uint64_t seed);

/// Monte-Carlo V^pi(x) from each start state.
Vector monte_carlo_value(const TabularMdp& mdp, const Matrix& reward, const Matrix& policy,
                         std::size_t rollouts, std::size_t horizon, std::uint64_t seed);

/// Smallest H with gamma^H * scale < bound.
std::size_t truncation_horizon(double discount, double scale, double bound);

/// Boltzmann policy of the exact Q* under R = phi . theta.
Matrix exact_boltzmann(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                       double temperature);

std::vector<Index> exact_greedy(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta);

/// log L = sum_i log pi_theta(a_i|x_i) with the inner problem solved exactly.
double exact_loglik(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                    double temperature, const Demonstration& demo);

/// J = sum_x mu(x) sum_a pi_hat(a|x) log pi_theta(a|x), counted straight from the pairs.
double exact_similarity(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                        double temperature, const Demonstration& demo);

/// J_PM = sum_x mu(x) sum_a (pi_hat(a|x) - pi_theta(a|x))^2, counted straight from the pairs.
double exact_pm_cost(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                     double temperature, const Demonstration& demo);

/// Central differences with step h along each coordinate.
Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& theta, double h);

/// True when the exact greedy policy is the same at theta and at every theta +- h e_k.
bool greedy_locally_constant(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                             double h);

/// Closest point of the 3-simplex to v by exhaustive search on a lattice of the given resolution.
Vector brute_force_simplex_projection(const Vector& v, double resolution);

/// ||a - b||_2 / max(||b||_2, floor).
double relative_error(const Vector& a, const Vector& b, double floor = 1e-12);

} // namespace mlirl::oracle
