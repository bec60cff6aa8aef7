#include "mlirl/estimators.hpp"

#include "mlirl/errors.hpp"

#include <cmath>
#include <string>

namespace mlirl {

std::string_view to_string(Estimator kind) {
    switch (kind) {
    case Estimator::FP: return "FP";
    case Estimator::IA: return "IA";
    case Estimator::FP1: return "FP1";
    }
    return "?";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "FP" || name == "fp") return Estimator::FP;
    if (name == "IA" || name == "ia" || name == "I") return Estimator::IA;
    if (name == "FP1" || name == "fp1") return Estimator::FP1;
    throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

namespace {

void check_inputs(const TabularMdp& mdp, const FeatureMap& features, const StochasticPolicy& policy) {
    check_dimensions(mdp, features);
    check_dimensions(mdp, policy);
}

// phi + gamma P (Pi psi) on the (state*action) x feature layout.
Matrix apply_operator(const TabularMdp& mdp, const Matrix& phi, const StochasticPolicy& policy,
                      const Matrix& psi) {
    return phi + mdp.discount() * (mdp.transitions() * policy_average(policy, psi));
}

} // namespace

QDerivative fp_feature_expectations(const TabularMdp& mdp, const FeatureMap& features,
                                    const StochasticPolicy& policy, double tol,
                                    std::size_t max_iter) {
    check_inputs(mdp, features, policy);
    if (!(tol > 0.0)) throw ConfigError("fp_feature_expectations: tol must be positive");
    const Matrix& phi = features.values();
    Matrix psi = Matrix::Zero(phi.rows(), phi.cols());
    double change = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        Matrix next = apply_operator(mdp, phi, policy, psi);
        change = (next - psi).lpNorm<Eigen::Infinity>();
        psi = std::move(next);
        if (change <= tol) return QDerivative{std::move(psi)};
    }
    throw ConvergenceError("fp_feature_expectations did not converge", change, max_iter);
}

QDerivative ia_derivative(const TabularMdp& mdp, const FeatureMap& features,
                          const StochasticPolicy& policy) {
    check_inputs(mdp, features, policy);
    const Index n = mdp.n_states();
    const Matrix& phi = features.values();
    const Matrix phi_bar = policy_average(policy, phi);

    Matrix t = Matrix::Identity(n, n);
    t -= mdp.discount() * Matrix(policy_transition(mdp, policy));
    const Eigen::PartialPivLU<Matrix> lu(t);
    const Matrix z = lu.solve(phi_bar);

    for (Index k = 0; k < z.cols(); ++k) {
        const double residual = (t * z.col(k) - phi_bar.col(k)).lpNorm<Eigen::Infinity>();
        const double scale = std::max(1.0, phi_bar.col(k).lpNorm<Eigen::Infinity>());
        if (!z.col(k).allFinite() || residual > 1e-10 * scale) {
            throw SolverError("ia_derivative: solve residual " + std::to_string(residual) +
                              " for feature " + std::to_string(k));
        }
    }
    return QDerivative{phi + mdp.discount() * (mdp.transitions() * z)};
}

QDerivative fp1_derivative(const TabularMdp& mdp, const FeatureMap& features,
                           const StochasticPolicy& policy, bool seed_at_features) {
    check_inputs(mdp, features, policy);
    const Matrix& phi = features.values();
    if (!seed_at_features) return QDerivative{phi};
    return QDerivative{apply_operator(mdp, phi, policy, phi)};
}

QDerivative estimate_q_derivative(const TabularMdp& mdp, const FeatureMap& features,
                                  const StochasticPolicy& policy, const EstimatorKind& kind) {
    switch (kind.kind) {
    case Estimator::FP:
        return fp_feature_expectations(mdp, features, policy, kind.fp_tol, kind.fp_max_iter);
    case Estimator::IA:
        return ia_derivative(mdp, features, policy);
    case Estimator::FP1:
        return fp1_derivative(mdp, features, policy, kind.fp1_seed_at_features);
    }
    throw ConfigError("estimate_q_derivative: unknown estimator");
}

Vector pair_likelihood_gradient(const QDerivative& q_deriv, const StochasticPolicy& boltzmann,
                                const BoltzmannConfig& cfg, Index state, Index action) {
    const Index na = boltzmann.n_actions();
    if (q_deriv.values.rows() != boltzmann.n_states() * na) {
        throw DimensionError("pair_likelihood_gradient: derivative and policy shapes differ");
    }
    const Matrix block = q_deriv.state_block(state, na);
    const Vector mean = block.transpose() * boltzmann.probs().row(state).transpose();
    const double l = boltzmann(state, action);
    return (l / cfg.temperature) * (block.row(action).transpose() - mean);
}

Vector loglik_gradient(const EmpiricalStats& stats, const StochasticPolicy& boltzmann,
                       const QDerivative& q_deriv, const BoltzmannConfig& cfg) {
    const Index n = boltzmann.n_states();
    const Index na = boltzmann.n_actions();
    if (stats.visitation.size() != n || stats.policy.n_states() != n || stats.policy.n_actions() != na ||
        q_deriv.values.rows() != n * na) {
        throw DimensionError("loglik_gradient: inconsistent shapes");
    }
    Vector delta = Vector::Zero(q_deriv.values.cols());
    for (Index x = 0; x < n; ++x) {
        const double mu = stats.visitation(x);
        if (mu == 0.0) continue;
        for (Index a = 0; a < na; ++a) {
            const double weight = mu * stats.policy(x, a);
            if (weight == 0.0) continue;
            const double l = boltzmann(x, a);
            if (l == 0.0) {
                throw SolverError("loglik_gradient: zero likelihood at demonstrated pair (" +
                                  std::to_string(x) + ", " + std::to_string(a) + ")");
            }
            delta += (weight / l) * pair_likelihood_gradient(q_deriv, boltzmann, cfg, x, a);
        }
    }
    return delta;
}

} // namespace mlirl
