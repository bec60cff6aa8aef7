#include "mlirl/metrics.hpp"

#include "mlirl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mlirl {

namespace {

constexpr double kExpertTieTol = 1e-9;

void check_pair(const StochasticPolicy& expert, const StochasticPolicy& learned) {
    if (expert.n_states() != learned.n_states() || expert.n_actions() != learned.n_actions()) {
        throw DimensionError("policy_agreement: policy shapes differ");
    }
    if (!expert.is_deterministic() || !learned.is_deterministic()) {
        throw ConfigError("policy_agreement: both policies must be deterministic");
    }
}

} // namespace

ExpertSolution solve_expert(const EnvironmentBundle& bundle) {
    ExpertSolution e;
    e.reward = bundle.true_reward();
    e.q = optimal_q(bundle.mdp, e.reward);
    e.greedy = greedy_policy(e.q);
    e.v = policy_evaluation(bundle.mdp, e.reward, e.greedy);
    e.value = total_value(bundle.mdp, e.v);
    return e;
}

double policy_agreement(const StochasticPolicy& expert_greedy, const StochasticPolicy& learned_greedy) {
    check_pair(expert_greedy, learned_greedy);
    const auto a = expert_greedy.actions();
    const auto b = learned_greedy.actions();
    std::size_t same = 0;
    for (std::size_t x = 0; x < a.size(); ++x) same += a[x] == b[x];
    return static_cast<double>(same) / static_cast<double>(a.size());
}

double policy_agreement(const StochasticPolicy& expert_greedy, const StochasticPolicy& learned_greedy,
                        const QFunction& expert_q) {
    check_pair(expert_greedy, learned_greedy);
    if (expert_q.values.rows() != expert_greedy.n_states() || expert_q.values.cols() != expert_greedy.n_actions()) {
        throw DimensionError("policy_agreement: expert Q shape differs");
    }
    const auto a = expert_greedy.actions();
    const auto b = learned_greedy.actions();
    std::size_t same = 0;
    for (std::size_t x = 0; x < a.size(); ++x) {
        if (a[x] == b[x]) {
            ++same;
            continue;
        }
        const auto row = expert_q.values.row(static_cast<Index>(x));
        const double top = row.maxCoeff();
        if (row(b[x]) >= top - kExpertTieTol * std::max(1.0, std::abs(top))) ++same;
    }
    return static_cast<double>(same) / static_cast<double>(a.size());
}

LearnedEvaluation evaluate_learned(const EnvironmentBundle& bundle, const ExpertSolution& expert,
                                   const StochasticPolicy& learned_greedy) {
    const ValueFunction v = policy_evaluation(bundle.mdp, expert.reward, learned_greedy);
    return LearnedEvaluation{total_value(bundle.mdp, v),
                             policy_agreement(expert.greedy, learned_greedy, expert.q)};
}

} // namespace mlirl
