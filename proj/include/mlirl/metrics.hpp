#pragma once

#include "mlirl/environments.hpp"
#include "mlirl/mdp.hpp"

namespace mlirl {

/// The expert's side of every comparison: optimal Q under the true reward and its greedy policy.
struct ExpertSolution {
    RewardTable reward;
    QFunction q;
    StochasticPolicy greedy;
    ValueFunction v;
    double value = 0.0; // total value of the greedy expert under the true reward
};

ExpertSolution solve_expert(const EnvironmentBundle& bundle);

/// Fraction of states where the two deterministic policies choose the same action.
double policy_agreement(const StochasticPolicy& expert_greedy, const StochasticPolicy& learned_greedy);

/// As above, but a state also matches when the learned action attains the expert's (tied) maximum.
double policy_agreement(const StochasticPolicy& expert_greedy, const StochasticPolicy& learned_greedy,
                        const QFunction& expert_q);

struct LearnedEvaluation {
    double value_true = 0.0;
    double policy_agreement = 0.0;
};

/// Total value of the learned greedy policy under the true reward, plus agreement with the expert.
LearnedEvaluation evaluate_learned(const EnvironmentBundle& bundle, const ExpertSolution& expert,
                                   const StochasticPolicy& learned_greedy);

} // namespace mlirl
