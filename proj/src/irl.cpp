#include "mlirl/irl.hpp"

#include "mlirl/errors.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <string>

namespace mlirl {

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::GIRL: return "GIRL";
    case Algorithm::PM: return "PM";
    case Algorithm::MWAL: return "MWAL";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "GIRL" || name == "girl") return Algorithm::GIRL;
    if (name == "PM" || name == "pm") return Algorithm::PM;
    if (name == "MWAL" || name == "mwal") return Algorithm::MWAL;
    throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

double similarity_J(const EmpiricalStats& stats, const StochasticPolicy& boltzmann) {
    if (stats.visitation.size() != boltzmann.n_states() || stats.policy.n_actions() != boltzmann.n_actions()) {
        throw DimensionError("similarity_J: shape mismatch");
    }
    double j = 0.0;
    for (Index x = 0; x < boltzmann.n_states(); ++x) {
        const double mu = stats.visitation(x);
        if (mu == 0.0) continue;
        for (Index a = 0; a < boltzmann.n_actions(); ++a) {
            const double w = mu * stats.policy(x, a);
            if (w != 0.0) j += w * std::log(boltzmann(x, a));
        }
    }
    return j;
}

double log_likelihood(const Demonstration& demo, const StochasticPolicy& boltzmann) {
    double total = 0.0;
    for (const auto& [x, a] : demo.pairs) {
        if (x < 0 || x >= boltzmann.n_states() || a < 0 || a >= boltzmann.n_actions()) {
            throw DimensionError("log_likelihood: pair out of range");
        }
        total += std::log(boltzmann(x, a));
    }
    return total;
}

double policy_matching_cost(const EmpiricalStats& stats, const StochasticPolicy& boltzmann) {
    if (stats.visitation.size() != boltzmann.n_states()) throw DimensionError("policy_matching_cost: shape mismatch");
    double cost = 0.0;
    for (Index x = 0; x < boltzmann.n_states(); ++x) {
        const double mu = stats.visitation(x);
        if (mu == 0.0) continue;
        cost += mu * (stats.policy.probs().row(x) - boltzmann.probs().row(x)).squaredNorm();
    }
    return cost;
}

Vector policy_matching_gradient(const EmpiricalStats& stats, const StochasticPolicy& boltzmann,
                                const QDerivative& q_deriv, const BoltzmannConfig& cfg) {
    const Index n = boltzmann.n_states();
    const Index na = boltzmann.n_actions();
    if (stats.visitation.size() != n || q_deriv.values.rows() != n * na) {
        throw DimensionError("policy_matching_gradient: shape mismatch");
    }
    Vector grad = Vector::Zero(q_deriv.values.cols());
    for (Index x = 0; x < n; ++x) {
        const double mu = stats.visitation(x);
        if (mu == 0.0) continue;
        for (Index a = 0; a < na; ++a) {
            const double diff = stats.policy(x, a) - boltzmann(x, a);
            if (diff == 0.0) continue;
            grad += (2.0 * mu * diff) * pair_likelihood_gradient(q_deriv, boltzmann, cfg, x, a);
        }
    }
    return grad;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_problem(const IrlProblem& problem, const EmpiricalStats& stats, const IrlConfig& cfg) {
    check_dimensions(problem.mdp, problem.features);
    if (stats.visitation.size() != problem.mdp.n_states() ||
        stats.policy.n_states() != problem.mdp.n_states() ||
        stats.policy.n_actions() != problem.mdp.n_actions()) {
        throw DimensionError("IRL: empirical statistics do not match the MDP");
    }
    if (cfg.n_iterations < 1) throw ConfigError("IRL: n_iterations must be at least 1");
    if (!(cfg.step_size > 0.0)) throw ConfigError("IRL: step_size must be positive");
    if (!(cfg.temperature > 0.0)) throw ConfigError("IRL: temperature must be positive");
}

// Everything computed at one weight vector.
struct Evaluation {
    Vector theta;
    ValueFunction v;
    StochasticPolicy boltzmann;
    std::vector<Index> greedy;
    Vector gradient;
    double objective = 0.0;
    double loglik = 0.0;
    double similarity = 0.0;
};

Evaluation evaluate(const IrlProblem& problem, const EmpiricalStats& stats, const IrlConfig& cfg,
                    const Vector& theta, const std::optional<Vector>& warm_start) {
    const BoltzmannConfig boltz{cfg.temperature};
    const RewardTable reward = assemble_reward(problem.features, theta);
    ValueIterationOptions vi = cfg.planning;
    if (warm_start) vi.initial = warm_start;
    Evaluation e;
    e.theta = theta;
    e.v = value_iteration(problem.mdp, reward, vi);
    const QFunction q = q_from_v(problem.mdp, reward, e.v);
    e.boltzmann = boltzmann_policy(q, boltz);
    const StochasticPolicy greedy = greedy_policy(q);
    e.greedy = greedy.actions();
    const QDerivative psi = estimate_q_derivative(problem.mdp, problem.features, greedy, cfg.estimator);

    e.similarity = similarity_J(stats, e.boltzmann);
    e.loglik = static_cast<double>(stats.n_pairs) * e.similarity;
    if (cfg.algorithm == Algorithm::PM) {
        e.gradient = policy_matching_gradient(stats, e.boltzmann, psi, boltz);
        e.objective = -policy_matching_cost(stats, e.boltzmann);
    } else {
        e.gradient = loglik_gradient(stats, e.boltzmann, psi, boltz);
        e.objective = e.loglik;
    }
    return e;
}

IrlResult run_gradient_ascent(const IrlProblem& problem, const EmpiricalStats& stats,
                              const IrlConfig& cfg) {
    check_problem(problem, stats, cfg);
    const Index n_features = problem.features.n_features();

    Vector theta = initial_weights(n_features, cfg.constraint_mode, problem.costs_only).theta();
    double step = cfg.step_size;
    std::optional<Evaluation> accepted;
    std::optional<Evaluation> best;
    std::size_t best_iteration = 0;
    IterationTrace trace;
    trace.reserve(cfg.n_iterations);

    for (std::size_t it = 0; it < cfg.n_iterations; ++it) {
        const auto start = Clock::now();
        Evaluation current;
        try {
            std::optional<Vector> warm;
            if (accepted) warm = accepted->v.values;
            current = evaluate(problem, stats, cfg, theta, warm);
        } catch (const Error&) {
            rethrow_with_context(std::string(to_string(cfg.algorithm)) + " iteration " +
                                 std::to_string(it) + ": ");
        }

        // Step acceptance: on a decrease fall back to the last accepted point with half the step.
        if (cfg.backtracking && accepted && current.objective < accepted->objective) {
            step *= 0.5;
            current = *accepted;
        }
        if (!best || current.objective > best->objective) {
            best = current;
            best_iteration = it;
        }

        const double norm = current.gradient.norm();
        if (norm > 0.0 && it + 1 < cfg.n_iterations) {
            theta = project_weights(current.theta + (step / norm) * current.gradient,
                                    cfg.constraint_mode)
                        .theta();
        } else {
            theta = current.theta;
        }

        IterationRecord record;
        record.theta = current.theta;
        record.loglik = current.loglik;
        record.similarity = current.similarity;
        record.objective = current.objective;
        record.greedy_actions = best->greedy;
        accepted = std::move(current);
        record.wall_ms = elapsed_ms(start);
        trace.push_back(std::move(record));
    }

    const Index na = problem.mdp.n_actions();
    return IrlResult{WeightVector(best->theta, cfg.constraint_mode), best->boltzmann,
                     StochasticPolicy::deterministic(best->greedy, na), std::move(trace),
                     best_iteration, Vector{}};
}

} // namespace

IrlResult run_girl(const IrlProblem& problem, const EmpiricalStats& stats, const IrlConfig& cfg) {
    if (cfg.algorithm != Algorithm::GIRL) throw ConfigError("run_girl: config is not GIRL");
    return run_gradient_ascent(problem, stats, cfg);
}

IrlResult run_pm(const IrlProblem& problem, const EmpiricalStats& stats, const IrlConfig& cfg) {
    if (cfg.algorithm != Algorithm::PM) throw ConfigError("run_pm: config is not PM");
    return run_gradient_ascent(problem, stats, cfg);
}

IrlResult run_mwal(const IrlProblem& problem, const EmpiricalStats& stats,
                   const Demonstration& demo, const IrlConfig& cfg) {
    return run_mwal(problem, stats,
                    empirical_feature_expectations(demo, problem.features, problem.mdp.discount()), cfg);
}

IrlResult run_mwal(const IrlProblem& problem, const EmpiricalStats& stats, const Vector& mu_expert,
                   const IrlConfig& cfg) {
    if (cfg.algorithm != Algorithm::MWAL) throw ConfigError("run_mwal: config is not MWAL");
    check_problem(problem, stats, cfg);
    const TabularMdp& mdp = problem.mdp;
    const Matrix& phi = problem.features.values();
    const Index k = phi.cols();
    const double gamma = mdp.discount();
    const BoltzmannConfig boltz{cfg.temperature};

    // Per-feature rescaling onto [0, 1]; a constant feature keeps unit scale.
    Vector scale(k);
    for (Index i = 0; i < k; ++i) {
        const double range = phi.col(i).maxCoeff() - phi.col(i).minCoeff();
        scale(i) = range > 0.0 ? 1.0 / range : 1.0;
    }
    if ((phi.array() < 0.0).any()) throw ConfigError("run_mwal: features must be nonnegative");

    // Costs: lower feature expectations are better, so the game runs on -phi.
    const double sense = problem.costs_only ? -1.0 : 1.0;
    if (mu_expert.size() != k) throw DimensionError("run_mwal: expert feature expectations have wrong size");
    const double beta =
        1.0 / (1.0 + std::sqrt(2.0 * std::log(static_cast<double>(k)) / static_cast<double>(cfg.n_iterations)));

    Vector weights = Vector::Ones(k);
    Matrix mixture = Matrix::Zero(mdp.n_states(), mdp.n_actions());
    Vector mu_sum = Vector::Zero(k);
    std::optional<Vector> warm;
    IterationTrace trace;
    trace.reserve(cfg.n_iterations);
    Vector reported;
    StochasticPolicy last_boltzmann;

    for (std::size_t it = 0; it < cfg.n_iterations; ++it) {
        const auto start = Clock::now();
        IterationRecord record;
        try {
            const Vector w = weights / weights.sum();
            reported = sense * w;
            const Vector theta = sense * w.cwiseProduct(scale);
            const RewardTable reward = assemble_reward(problem.features, theta);
            ValueIterationOptions vi = cfg.planning;
            if (warm) vi.initial = warm;
            const ValueFunction v = value_iteration(mdp, reward, vi);
            warm = v.values;
            const QFunction q = q_from_v(mdp, reward, v);
            const StochasticPolicy greedy = greedy_policy(q);
            const QDerivative psi = estimate_q_derivative(mdp, problem.features, greedy, cfg.estimator);
            const Vector mu = policy_average(greedy, psi.values).transpose() * mdp.initial_dist();

            for (Index i = 0; i < k; ++i) {
                const double g = ((1.0 - gamma) * sense * scale(i) * (mu(i) - mu_expert(i)) + 2.0) / 4.0;
                weights(i) *= std::pow(beta, g);
            }
            mixture += greedy.probs();
            mu_sum += mu;

            last_boltzmann = boltzmann_policy(q, boltz);
            record.theta = reported;
            record.similarity = similarity_J(stats, last_boltzmann);
            record.loglik = static_cast<double>(stats.n_pairs) * record.similarity;
            record.objective = record.similarity;
            const Matrix running = mixture / static_cast<double>(it + 1);
            record.greedy_actions = greedy_policy(QFunction{running}).actions();
        } catch (const Error&) {
            rethrow_with_context("MWAL iteration " + std::to_string(it) + ": ");
        }
        record.wall_ms = elapsed_ms(start);
        trace.push_back(std::move(record));
    }

    StochasticPolicy mix(mixture / static_cast<double>(cfg.n_iterations));
    StochasticPolicy mix_greedy = greedy_policy(QFunction{mix.probs()});
    WeightVector final_weights = cfg.constraint_mode == ConstraintMode::Unconstrained
                                     ? WeightVector(reported, ConstraintMode::Unconstrained)
                                     : project_weights(reported, cfg.constraint_mode);
    IrlResult result{std::move(final_weights), std::move(mix), std::move(mix_greedy), std::move(trace),
                     cfg.n_iterations - 1, mu_sum / static_cast<double>(cfg.n_iterations)};
    return result;
}

IrlResult run_irl(const IrlProblem& problem, const EmpiricalStats& stats, const Demonstration& demo,
                  const IrlConfig& cfg) {
    switch (cfg.algorithm) {
    case Algorithm::GIRL: return run_girl(problem, stats, cfg);
    case Algorithm::PM: return run_pm(problem, stats, cfg);
    case Algorithm::MWAL: return run_mwal(problem, stats, demo, cfg);
    }
    throw ConfigError("run_irl: unknown algorithm");
}

} // namespace mlirl
