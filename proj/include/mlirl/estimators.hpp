#pragma once

#include "mlirl/demonstrations.hpp"
#include "mlirl/features.hpp"
#include "mlirl/mdp.hpp"

#include <string_view>

namespace mlirl {

/**
 * dQ*(x,a)/dtheta_k as a (state * action) x feature matrix, row `x * A + a`.
 * For linear rewards this equals the feature expectations Phi^pi(x, a).
 */
struct QDerivative {
    Matrix values;

    /// Derivative rows of one state, as an action x feature block.
    Matrix state_block(Index state, Index n_actions) const {
        return values.middleRows(state * n_actions, n_actions);
    }
};

enum class Estimator { FP, IA, FP1 };

std::string_view to_string(Estimator kind);
Estimator parse_estimator(std::string_view name);

struct EstimatorKind {
    Estimator kind = Estimator::FP;
    double fp_tol = 1e-8;
    std::size_t fp_max_iter = 10000;
    /// FP1 variant: seed the single sweep at phi (default) or return phi itself.
    bool fp1_seed_at_features = true;
};

/// Fixed-point recursion psi <- phi + gamma P (Pi psi) from psi = 0 until the sup-norm change <= tol.
QDerivative fp_feature_expectations(const TabularMdp& mdp, const FeatureMap& features,
                                    const StochasticPolicy& policy, double tol = 1e-8,
                                    std::size_t max_iter = 10000);

/// Independence-assumption derivative phi + gamma P_a T^{-1} (Pi phi), T = I - gamma P_pi,
/// with one LU factorization of T shared by all features.
QDerivative ia_derivative(const TabularMdp& mdp, const FeatureMap& features,
                          const StochasticPolicy& policy);

/// One application of the fixed-point operator seeded at phi: phi + gamma P (Pi phi).
/// With `seed_at_features == false` the estimator degenerates to phi.
QDerivative fp1_derivative(const TabularMdp& mdp, const FeatureMap& features,
                           const StochasticPolicy& policy, bool seed_at_features = true);

QDerivative estimate_q_derivative(const TabularMdp& mdp, const FeatureMap& features,
                                  const StochasticPolicy& policy, const EstimatorKind& kind);

/// d l(x,a) / d theta_k = (l(x,a) / eta) (Psi_k(x,a) - sum_b l(x,b) Psi_k(x,b)).
Vector pair_likelihood_gradient(const QDerivative& q_deriv, const StochasticPolicy& boltzmann,
                                const BoltzmannConfig& cfg, Index state, Index action);

/// Delta_k = sum_{x,a} mu_E(x) pi_hat_E(a|x) (1 / l(x,a)) d l(x,a) / d theta_k.
Vector loglik_gradient(const EmpiricalStats& stats, const StochasticPolicy& boltzmann,
                       const QDerivative& q_deriv, const BoltzmannConfig& cfg);

} // namespace mlirl
