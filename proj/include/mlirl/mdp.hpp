#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <span>
#include <vector>

namespace mlirl {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Transition kernel stored row-wise: row `x * n_actions + a` holds P(. | x, a).
using TransitionMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// One nonzero entry P(next | state, action) = prob.
struct Transition {
    Index state;
    Index action;
    Index next;
    double prob;
};

/**
 * Finite MDP without a reward: states, actions, transition kernel, discount and
 * initial-state distribution.
 *
 * The constructor validates every invariant (stochastic rows within 1e-12,
 * nonnegative entries, discount in [0,1), initial distribution on the simplex)
 * and throws InvariantError otherwise. Instances are immutable.
 */
class TabularMdp {
public:
    TabularMdp(Index n_states, Index n_actions, const std::vector<Transition>& transitions,
               double discount, Vector initial_dist);

    /// Builds from a dense tensor laid out as [state][action][next_state].
    static TabularMdp from_dense(Index n_states, Index n_actions, std::span<const double> tensor,
                                 double discount, Vector initial_dist);

    Index n_states() const noexcept { return n_states_; }
    Index n_actions() const noexcept { return n_actions_; }
    double discount() const noexcept { return discount_; }
    const Vector& initial_dist() const noexcept { return initial_dist_; }
    const TransitionMatrix& transitions() const noexcept { return transitions_; }

    Index row(Index state, Index action) const noexcept { return state * n_actions_ + action; }
    double probability(Index state, Index action, Index next) const;

    /// Every action leads back to `state` with probability one.
    bool is_absorbing(Index state) const;

    /// Same dynamics with a different discount.
    TabularMdp with_discount(double discount) const;

    /// All nonzero transitions in (state, action, next) order.
    std::vector<Transition> transition_list() const;

private:
    TabularMdp() = default;
    void validate() const;

    Index n_states_ = 0;
    Index n_actions_ = 0;
    double discount_ = 0.0;
    Vector initial_dist_;
    TransitionMatrix transitions_;
};

struct RewardTable {
    Matrix values; // (state, action)
};

struct ValueFunction {
    Vector values;
};

struct QFunction {
    Matrix values; // (state, action)
};

/// pi(a | x) stored as a (state, action) matrix with stochastic rows.
class StochasticPolicy {
public:
    StochasticPolicy() = default;
    /// Throws InvariantError unless every row is nonnegative and sums to 1 within 1e-12.
    explicit StochasticPolicy(Matrix probs);

    static StochasticPolicy deterministic(std::span<const Index> actions, Index n_actions);
    static StochasticPolicy uniform(Index n_states, Index n_actions);

    const Matrix& probs() const noexcept { return probs_; }
    Index n_states() const noexcept { return probs_.rows(); }
    Index n_actions() const noexcept { return probs_.cols(); }
    double operator()(Index state, Index action) const { return probs_(state, action); }

    /// Highest-probability action per state, lowest index on ties.
    std::vector<Index> actions() const;
    bool is_deterministic() const;

private:
    Matrix probs_;
};

struct BoltzmannConfig {
    double temperature = 1.0; // eta

    /// Confidence parameter of the likelihood model, 1 / eta.
    double confidence() const { return 1.0 / temperature; }
};

struct ValueIterationOptions {
    double tol = 1e-8;
    std::size_t max_iter = 100000;
    /// Starting point; zero when empty.
    std::optional<Vector> initial;
};

/// Optimal values, stopped once the Bellman residual guarantees |V - V*|_inf <= tol.
ValueFunction value_iteration(const TabularMdp& mdp, const RewardTable& reward,
                              const ValueIterationOptions& options = {});

QFunction q_from_v(const TabularMdp& mdp, const RewardTable& reward, const ValueFunction& v);

/// Ties (within 1e-10) go to the lowest action index.
StochasticPolicy greedy_policy(const QFunction& q);

StochasticPolicy boltzmann_policy(const QFunction& q, const BoltzmannConfig& cfg);

/// Exact V^pi from a direct solve of (I - gamma P_pi) V = R_pi.
ValueFunction policy_evaluation(const TabularMdp& mdp, const RewardTable& reward,
                                const StochasticPolicy& policy);

double total_value(const TabularMdp& mdp, const ValueFunction& v);

/// P_pi(x, y) = sum_a pi(a|x) P(y|x,a).
Eigen::SparseMatrix<double> policy_transition(const TabularMdp& mdp, const StochasticPolicy& policy);

/// Averages a (state*action, k) block over actions: out(x, k) = sum_a pi(a|x) in(x*A + a, k).
Matrix policy_average(const StochasticPolicy& policy, const Matrix& per_pair);

/// Solves Q* exactly: value iteration, then policy-iteration steps until the greedy policy is stable.
QFunction optimal_q(const TabularMdp& mdp, const RewardTable& reward,
                    const ValueIterationOptions& options = {});

void check_dimensions(const TabularMdp& mdp, const RewardTable& reward);
void check_dimensions(const TabularMdp& mdp, const StochasticPolicy& policy);

} // namespace mlirl
