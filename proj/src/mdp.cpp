#include "mlirl/mdp.hpp"

#include "mlirl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mlirl {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kTieTol = 1e-10;

std::string state_action(Index x, Index a) {
    return "(" + std::to_string(x) + ", " + std::to_string(a) + ")";
}

} // namespace

TabularMdp::TabularMdp(Index n_states, Index n_actions, const std::vector<Transition>& transitions,
                       double discount, Vector initial_dist)
    : n_states_(n_states), n_actions_(n_actions), discount_(discount),
      initial_dist_(std::move(initial_dist)) {
    if (n_states <= 0 || n_actions <= 0) {
        throw InvariantError("TabularMdp: state and action counts must be positive");
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(transitions.size());
    for (const auto& t : transitions) {
        if (t.state < 0 || t.state >= n_states || t.action < 0 || t.action >= n_actions ||
            t.next < 0 || t.next >= n_states) {
            throw DimensionError("TabularMdp: transition index out of range at " +
                                 state_action(t.state, t.action));
        }
        if (!(t.prob >= 0.0) || !std::isfinite(t.prob)) {
            throw InvariantError("TabularMdp: negative or non-finite probability at " +
                                 state_action(t.state, t.action));
        }
        if (t.prob > 0.0) {
            triplets.emplace_back(t.state * n_actions + t.action, t.next, t.prob);
        }
    }
    transitions_.resize(n_states * n_actions, n_states);
    transitions_.setFromTriplets(triplets.begin(), triplets.end());
    transitions_.makeCompressed();
    validate();
}

TabularMdp TabularMdp::from_dense(Index n_states, Index n_actions, std::span<const double> tensor,
                                  double discount, Vector initial_dist) {
    if (n_states <= 0 || n_actions <= 0 ||
        tensor.size() != static_cast<std::size_t>(n_states * n_actions * n_states)) {
        throw DimensionError("TabularMdp::from_dense: tensor size does not match dimensions");
    }
    std::vector<Transition> list;
    for (Index x = 0; x < n_states; ++x) {
        for (Index a = 0; a < n_actions; ++a) {
            for (Index y = 0; y < n_states; ++y) {
                const double p = tensor[static_cast<std::size_t>((x * n_actions + a) * n_states + y)];
                if (p != 0.0) list.push_back({x, a, y, p});
            }
        }
    }
    return TabularMdp(n_states, n_actions, list, discount, std::move(initial_dist));
}

void TabularMdp::validate() const {
    if (!(discount_ >= 0.0 && discount_ < 1.0)) {
        throw InvariantError("TabularMdp: discount must lie in [0, 1)");
    }
    if (initial_dist_.size() != n_states_) {
        throw DimensionError("TabularMdp: initial distribution has wrong length");
    }
    if ((initial_dist_.array() < 0.0).any() || !initial_dist_.allFinite()) {
        throw InvariantError("TabularMdp: initial distribution has negative entries");
    }
    if (std::abs(initial_dist_.sum() - 1.0) > kStochasticTol) {
        throw InvariantError("TabularMdp: initial distribution does not sum to 1");
    }
    for (Index r = 0; r < transitions_.outerSize(); ++r) {
        double sum = 0.0;
        for (TransitionMatrix::InnerIterator it(transitions_, r); it; ++it) sum += it.value();
        if (std::abs(sum - 1.0) > kStochasticTol) {
            throw InvariantError("TabularMdp: transition row " +
                                 state_action(r / n_actions_, r % n_actions_) +
                                 " sums to " + std::to_string(sum));
        }
    }
}

double TabularMdp::probability(Index state, Index action, Index next) const {
    if (state < 0 || state >= n_states_ || action < 0 || action >= n_actions_ || next < 0 ||
        next >= n_states_) {
        throw DimensionError("TabularMdp::probability: index out of range");
    }
    return transitions_.coeff(row(state, action), next);
}

bool TabularMdp::is_absorbing(Index state) const {
    for (Index a = 0; a < n_actions_; ++a) {
        if (transitions_.coeff(row(state, a), state) != 1.0) return false;
    }
    return true;
}

TabularMdp TabularMdp::with_discount(double discount) const {
    TabularMdp copy = *this;
    copy.discount_ = discount;
    copy.validate();
    return copy;
}

std::vector<Transition> TabularMdp::transition_list() const {
    std::vector<Transition> out;
    out.reserve(static_cast<std::size_t>(transitions_.nonZeros()));
    for (Index r = 0; r < transitions_.outerSize(); ++r) {
        for (TransitionMatrix::InnerIterator it(transitions_, r); it; ++it) {
            out.push_back({r / n_actions_, r % n_actions_, it.col(), it.value()});
        }
    }
    return out;
}

StochasticPolicy::StochasticPolicy(Matrix probs) : probs_(std::move(probs)) {
    if (probs_.rows() == 0 || probs_.cols() == 0) {
        throw InvariantError("StochasticPolicy: empty table");
    }
    for (Index x = 0; x < probs_.rows(); ++x) {
        if ((probs_.row(x).array() < 0.0).any() || !probs_.row(x).allFinite()) {
            throw InvariantError("StochasticPolicy: negative entry in row " + std::to_string(x));
        }
        if (std::abs(probs_.row(x).sum() - 1.0) > kStochasticTol) {
            throw InvariantError("StochasticPolicy: row " + std::to_string(x) +
                                 " does not sum to 1");
        }
    }
}

StochasticPolicy StochasticPolicy::deterministic(std::span<const Index> actions, Index n_actions) {
    Matrix probs = Matrix::Zero(static_cast<Index>(actions.size()), n_actions);
    for (std::size_t x = 0; x < actions.size(); ++x) {
        if (actions[x] < 0 || actions[x] >= n_actions) {
            throw DimensionError("StochasticPolicy::deterministic: action out of range");
        }
        probs(static_cast<Index>(x), actions[x]) = 1.0;
    }
    return StochasticPolicy(std::move(probs));
}

StochasticPolicy StochasticPolicy::uniform(Index n_states, Index n_actions) {
    return StochasticPolicy(Matrix::Constant(n_states, n_actions, 1.0 / static_cast<double>(n_actions)));
}

std::vector<Index> StochasticPolicy::actions() const {
    std::vector<Index> out(static_cast<std::size_t>(probs_.rows()));
    for (Index x = 0; x < probs_.rows(); ++x) {
        Index best = 0;
        for (Index a = 1; a < probs_.cols(); ++a) {
            if (probs_(x, a) > probs_(x, best)) best = a;
        }
        out[static_cast<std::size_t>(x)] = best;
    }
    return out;
}

bool StochasticPolicy::is_deterministic() const {
    return ((probs_.array() == 0.0) || (probs_.array() == 1.0)).all();
}

void check_dimensions(const TabularMdp& mdp, const RewardTable& reward) {
    if (reward.values.rows() != mdp.n_states() || reward.values.cols() != mdp.n_actions()) {
        throw DimensionError("reward table shape does not match the MDP");
    }
}

void check_dimensions(const TabularMdp& mdp, const StochasticPolicy& policy) {
    if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions()) {
        throw DimensionError("policy shape does not match the MDP");
    }
}

namespace {

// Q as a flat (state*action) vector.
Vector backup(const TabularMdp& mdp, const Vector& reward_flat, const Vector& v) {
    return reward_flat + mdp.discount() * (mdp.transitions() * v);
}

Vector flatten(const Matrix& m) {
    // Row-major flattening so entry x*A + a is m(x, a).
    Vector out(m.size());
    for (Index x = 0; x < m.rows(); ++x) out.segment(x * m.cols(), m.cols()) = m.row(x).transpose();
    return out;
}

Matrix unflatten(const Vector& v, Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index x = 0; x < rows; ++x) out.row(x) = v.segment(x * cols, cols).transpose();
    return out;
}

} // namespace

ValueFunction value_iteration(const TabularMdp& mdp, const RewardTable& reward,
                              const ValueIterationOptions& options) {
    check_dimensions(mdp, reward);
    if (!(options.tol > 0.0)) throw ConfigError("value_iteration: tol must be positive");
    if (!reward.values.allFinite()) throw InvariantError("value_iteration: non-finite reward");

    const Index n = mdp.n_states();
    const Index na = mdp.n_actions();
    const double gamma = mdp.discount();
    const Vector r = flatten(reward.values);

    Vector v = options.initial ? *options.initial : Vector::Zero(n);
    if (v.size() != n) throw DimensionError("value_iteration: warm start has wrong length");

    // |V_{k+1} - V_k| <= tol (1 - gamma) / gamma implies |V_{k+1} - V*| <= tol.
    const double threshold =
        gamma > 0.0 ? options.tol * (1.0 - gamma) / gamma : std::numeric_limits<double>::infinity();

    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        const Vector q = backup(mdp, r, v);
        Vector next(n);
        for (Index x = 0; x < n; ++x) next(x) = q.segment(x * na, na).maxCoeff();
        residual = (next - v).lpNorm<Eigen::Infinity>();
        v = std::move(next);
        if (residual <= threshold) return ValueFunction{std::move(v)};
    }
    throw ConvergenceError("value_iteration did not converge", residual, options.max_iter);
}

QFunction q_from_v(const TabularMdp& mdp, const RewardTable& reward, const ValueFunction& v) {
    check_dimensions(mdp, reward);
    if (v.values.size() != mdp.n_states()) {
        throw DimensionError("q_from_v: value function has wrong length");
    }
    const Vector q = backup(mdp, flatten(reward.values), v.values);
    return QFunction{unflatten(q, mdp.n_states(), mdp.n_actions())};
}

StochasticPolicy greedy_policy(const QFunction& q) {
    const Matrix& values = q.values;
    std::vector<Index> actions(static_cast<std::size_t>(values.rows()));
    for (Index x = 0; x < values.rows(); ++x) {
        const double best = values.row(x).maxCoeff();
        Index chosen = 0;
        while (values(x, chosen) < best - kTieTol) ++chosen;
        actions[static_cast<std::size_t>(x)] = chosen;
    }
    return StochasticPolicy::deterministic(actions, values.cols());
}

StochasticPolicy boltzmann_policy(const QFunction& q, const BoltzmannConfig& cfg) {
    if (!(cfg.temperature > 0.0)) throw ConfigError("boltzmann_policy: temperature must be positive");
    Matrix probs(q.values.rows(), q.values.cols());
    for (Index x = 0; x < q.values.rows(); ++x) {
        const double top = q.values.row(x).maxCoeff();
        probs.row(x) = ((q.values.row(x).array() - top) / cfg.temperature).exp().matrix();
        probs.row(x) /= probs.row(x).sum();
    }
    return StochasticPolicy(std::move(probs));
}

Eigen::SparseMatrix<double> policy_transition(const TabularMdp& mdp, const StochasticPolicy& policy) {
    check_dimensions(mdp, policy);
    std::vector<Eigen::Triplet<double>> triplets;
    const auto& p = mdp.transitions();
    for (Index x = 0; x < mdp.n_states(); ++x) {
        for (Index a = 0; a < mdp.n_actions(); ++a) {
            const double w = policy(x, a);
            if (w == 0.0) continue;
            for (TransitionMatrix::InnerIterator it(p, mdp.row(x, a)); it; ++it) {
                triplets.emplace_back(x, it.col(), w * it.value());
            }
        }
    }
    Eigen::SparseMatrix<double> out(mdp.n_states(), mdp.n_states());
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

Matrix policy_average(const StochasticPolicy& policy, const Matrix& per_pair) {
    const Index n = policy.n_states();
    const Index na = policy.n_actions();
    if (per_pair.rows() != n * na) throw DimensionError("policy_average: row count mismatch");
    Matrix out = Matrix::Zero(n, per_pair.cols());
    for (Index x = 0; x < n; ++x) {
        for (Index a = 0; a < na; ++a) {
            const double w = policy(x, a);
            if (w != 0.0) out.row(x) += w * per_pair.row(x * na + a);
        }
    }
    return out;
}

ValueFunction policy_evaluation(const TabularMdp& mdp, const RewardTable& reward,
                                const StochasticPolicy& policy) {
    check_dimensions(mdp, reward);
    check_dimensions(mdp, policy);
    const Index n = mdp.n_states();
    const Vector r_pi = policy.probs().cwiseProduct(reward.values).rowwise().sum();
    Matrix t = Matrix::Identity(n, n);
    t -= mdp.discount() * Matrix(policy_transition(mdp, policy));
    const Eigen::PartialPivLU<Matrix> lu(t);
    Vector v = lu.solve(r_pi);
    const double residual = (t * v - r_pi).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, r_pi.lpNorm<Eigen::Infinity>());
    if (!v.allFinite() || residual > 1e-10 * scale) {
        throw SolverError("policy_evaluation: linear solve residual " + std::to_string(residual));
    }
    return ValueFunction{std::move(v)};
}

double total_value(const TabularMdp& mdp, const ValueFunction& v) {
    if (v.values.size() != mdp.n_states()) throw DimensionError("total_value: length mismatch");
    return mdp.initial_dist().dot(v.values);
}

QFunction optimal_q(const TabularMdp& mdp, const RewardTable& reward,
                    const ValueIterationOptions& options) {
    ValueFunction v = value_iteration(mdp, reward, options);
    QFunction q = q_from_v(mdp, reward, v);
    std::vector<Index> current = greedy_policy(q).actions();
    for (Index round = 0; round < mdp.n_states() + 1; ++round) {
        const auto policy = StochasticPolicy::deterministic(current, mdp.n_actions());
        v = policy_evaluation(mdp, reward, policy);
        q = q_from_v(mdp, reward, v);
        // Only switch where the improvement is not a rounding-level tie.
        bool changed = false;
        for (Index x = 0; x < mdp.n_states(); ++x) {
            const Index a = current[static_cast<std::size_t>(x)];
            Index best = a;
            for (Index b = 0; b < mdp.n_actions(); ++b) {
                if (q.values(x, b) > q.values(x, best) + kTieTol * std::max(1.0, std::abs(q.values(x, best)))) {
                    best = b;
                }
            }
            if (best != a) {
                current[static_cast<std::size_t>(x)] = best;
                changed = true;
            }
        }
        if (!changed) return q;
    }
    return q;
}

} // namespace mlirl
