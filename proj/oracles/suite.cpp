#include "suite.hpp"

#include "oracles.hpp"

#include "mlirl/demonstrations.hpp"
#include "mlirl/environments.hpp"
#include "mlirl/estimators.hpp"
#include "mlirl/experiment.hpp"
#include "mlirl/irl.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace mlirl::oracle {

namespace {

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

CheckResult verdict(const char* name, bool passed, std::string detail) {
    return CheckResult{name, passed, std::move(detail), 0.0};
}

struct Instance {
    TabularMdp mdp;
    FeatureMap features;
    Vector theta;
};

Instance make_instance(std::uint64_t seed, Index n_states, Index n_actions, Index n_features, double gamma) {
    return Instance{random_mdp(n_states, n_actions, gamma, seed),
                    random_features(n_states, n_actions, n_features, seed),
                    random_l1_weights(n_features, seed)};
}

StochasticPolicy library_greedy(const Instance& inst) {
    return greedy_policy(optimal_q(inst.mdp, assemble_reward(inst.features, inst.theta)));
}

// Random stochastic policy with strictly positive rows.
Matrix random_policy(Index n_states, Index n_actions, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ 0x7f4a7c159e3779b9ULL);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Matrix pi(n_states, n_actions);
    for (Index x = 0; x < n_states; ++x) {
        for (Index a = 0; a < n_actions; ++a) pi(x, a) = u(gen);
        pi.row(x) /= pi.row(x).sum();
    }
    return pi;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

constexpr double kFdStep = 1e-5;
constexpr double kFdRelTol = 1e-3;

// Gradient of the likelihood-style objective from the library's FP estimate at theta.
struct LibraryGradient {
    StochasticPolicy boltzmann;
    QDerivative psi;
};

LibraryGradient library_gradient_inputs(const Instance& inst, double eta) {
    const QFunction q = optimal_q(inst.mdp, assemble_reward(inst.features, inst.theta));
    return LibraryGradient{boltzmann_policy(q, BoltzmannConfig{eta}),
                           fp_feature_expectations(inst.mdp, inst.features, greedy_policy(q))};
}

} // namespace

CheckResult gradient_oracle_check() {
    constexpr double eta = 0.5;
    std::size_t checked = 0, skipped = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        if (!greedy_locally_constant(inst.mdp, inst.features, inst.theta, kFdStep)) {
            ++skipped;
            continue;
        }
        const Demonstration demo = random_pairs(5, 3, 40, seed);
        const EmpiricalStats stats = empirical_policy(demo, 5, 3);
        const auto lib = library_gradient_inputs(inst, eta);
        const Vector grad = static_cast<double>(demo.m()) *
                            loglik_gradient(stats, lib.boltzmann, lib.psi, BoltzmannConfig{eta});
        const Vector fd = central_difference(
            [&](const Vector& t) { return exact_loglik(inst.mdp, inst.features, t, eta, demo); }, inst.theta,
            kFdStep);
        worst = std::max(worst, relative_error(grad, fd));
        ++checked;
    }
    return verdict("fp-gradient-vs-finite-difference", checked > 0 && worst <= kFdRelTol,
                   std::to_string(checked) + " instances, " + std::to_string(skipped) +
                       " skipped at switch points, max rel err " + fmt(worst));
}

CheckResult fp_ia_identity_check() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        const StochasticPolicy greedy = library_greedy(inst);
        const QDerivative fp = fp_feature_expectations(inst.mdp, inst.features, greedy);
        const QDerivative ia = ia_derivative(inst.mdp, inst.features, greedy);
        worst = std::max(worst, max_abs(fp.values - ia.values));
    }
    return verdict("fp-ia-identity", worst <= 1e-6, "20 instances, max abs diff " + fmt(worst));
}

CheckResult fp_monte_carlo_check() {
    constexpr double gamma = 0.9;
    const std::size_t horizon = truncation_horizon(gamma, 1.0, 1e-4);
    double worst = 0.0;
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        const TabularMdp mdp = random_mdp(4, 3, gamma, seed);
        const FeatureMap phi = random_features(4, 3, 2, seed);
        const Matrix pi = random_policy(4, 3, seed);
        const QDerivative fp = fp_feature_expectations(mdp, phi, StochasticPolicy(pi));
        const Matrix mc = monte_carlo_feature_expectations(mdp, phi, pi, 100000, horizon, seed);
        worst = std::max(worst, max_abs(fp.values - mc));
    }
    return verdict("fp-monte-carlo", worst <= 1e-2, "5 instances, max abs diff " + fmt(worst));
}

namespace {

CheckResult value_iteration_vs_linear_solve() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        const RewardTable r = assemble_reward(inst.features, inst.theta);
        const ValueFunction v = value_iteration(inst.mdp, r);
        const StochasticPolicy greedy = greedy_policy(q_from_v(inst.mdp, r, v));
        const Vector exact = exact_policy_value(inst.mdp, r.values, greedy.probs());
        worst = std::max(worst, (v.values - exact).cwiseAbs().maxCoeff());
    }
    return verdict("value-iteration-vs-linear-solve", worst <= 1e-6, "max abs diff " + fmt(worst));
}

CheckResult q_from_v_consistency() {
    constexpr double tol = 1e-8;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        const RewardTable r = assemble_reward(inst.features, inst.theta);
        ValueIterationOptions opts;
        opts.tol = tol;
        const ValueFunction v = value_iteration(inst.mdp, r, opts);
        const QFunction q = q_from_v(inst.mdp, r, v);
        worst = std::max(worst, (q.values.rowwise().maxCoeff() - v.values).cwiseAbs().maxCoeff());
    }
    return verdict("q-from-v-consistency", worst <= 2 * tol, "max |max_a Q - V| " + fmt(worst));
}

CheckResult greedy_fixed_point() {
    constexpr double tol = 1e-8;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        const RewardTable r = assemble_reward(inst.features, inst.theta);
        const Matrix q_star = exact_optimal_q(inst.mdp, r.values);
        const Vector v_star = q_star.rowwise().maxCoeff();
        const ValueFunction v = value_iteration(inst.mdp, r);
        const StochasticPolicy greedy = greedy_policy(q_from_v(inst.mdp, r, v));
        const ValueFunction back = policy_evaluation(inst.mdp, r, greedy);
        worst = std::max(worst, (back.values - v_star).cwiseAbs().maxCoeff());
    }
    return verdict("greedy-fixed-point", worst <= 10 * tol, "max abs diff " + fmt(worst));
}

CheckResult greedy_brute_force() {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
        Matrix q(3, 3);
        for (Index i = 0; i < 9; ++i) q(i / 3, i % 3) = u(gen);
        const auto chosen = greedy_policy(QFunction{q}).actions();
        double chosen_sum = 0.0;
        for (Index x = 0; x < 3; ++x) chosen_sum += q(x, chosen[static_cast<std::size_t>(x)]);
        double best = -1e300;
        for (Index code = 0; code < 27; ++code) {
            const double s = q(0, code % 3) + q(1, (code / 3) % 3) + q(2, code / 9);
            best = std::max(best, s);
        }
        ok = chosen_sum == best;
    }
    return verdict("greedy-brute-force", ok, "20 random 3x3 Q tables, 27 policies each");
}

CheckResult boltzmann_closed_form() {
    Matrix q(1, 2);
    q << 0.0, 1.0;
    const StochasticPolicy pi = boltzmann_policy(QFunction{q}, BoltzmannConfig{1.0});
    const double e = std::exp(1.0);
    const double err = std::max(std::abs(pi(0, 0) - 1.0 / (1.0 + e)), std::abs(pi(0, 1) - e / (1.0 + e)));
    return verdict("boltzmann-closed-form", err <= 1e-12, "max abs diff " + fmt(err));
}

CheckResult policy_evaluation_monte_carlo() {
    constexpr double gamma = 0.9;
    const std::size_t horizon = truncation_horizon(gamma, 1.0, 1e-4);
    double worst = 0.0;
    for (std::uint64_t seed = 200; seed < 203; ++seed) {
        const Instance inst = make_instance(seed, 4, 3, 2, gamma);
        const Matrix r = random_features(4, 3, 1, seed + 1).values().reshaped<Eigen::RowMajor>(4, 3);
        const Matrix pi = random_policy(4, 3, seed);
        const ValueFunction v = policy_evaluation(inst.mdp, RewardTable{r}, StochasticPolicy(pi));
        const Vector mc = monte_carlo_value(inst.mdp, r, pi, 100000, horizon, seed);
        worst = std::max(worst, (v.values - mc).cwiseAbs().maxCoeff());
    }
    return verdict("policy-evaluation-monte-carlo", worst <= 1e-2, "max abs diff " + fmt(worst));
}

CheckResult simplex_projection_brute_force() {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> n(0.0, 1.0);
    double worst = 0.0;
    std::size_t subproblems = 0;
    for (int trial = 0; trial < 10; ++trial) {
        Vector v(6);
        for (Index i = 0; i < 6; ++i) v(i) = n(gen);
        const Vector p = project_weights(v, ConstraintMode::NonnegSimplex).theta();
        // The restriction of the projection to any 3 coordinates is the projection of
        // those coordinates onto the simplex scaled to their current sum.
        for (Index i = 0; i < 4; ++i) {
            const Vector sub_v = v.segment(i, 3);
            const double s = p.segment(i, 3).sum();
            if (s < 1e-3) continue;
            const Vector brute = s * brute_force_simplex_projection(sub_v / s, 1e-3);
            worst = std::max(worst, (p.segment(i, 3) - brute).cwiseAbs().maxCoeff());
            ++subproblems;
        }
    }
    return verdict("simplex-projection-brute-force", subproblems > 0 && worst <= 1e-3,
                   std::to_string(subproblems) + " subproblems, max abs diff " + fmt(worst));
}

CheckResult fp_reward_as_feature() {
    constexpr double tol = 1e-8;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        const RewardTable r = assemble_reward(inst.features, inst.theta);
        const FeatureMap single(5, 3, r.values.reshaped<Eigen::RowMajor>(15, 1));
        const Matrix pi = random_policy(5, 3, seed);
        const QDerivative psi = fp_feature_expectations(inst.mdp, single, StochasticPolicy(pi), tol);
        const Vector v = exact_policy_value(inst.mdp, r.values, pi);
        const auto p = dense_transitions(inst.mdp);
        for (Index x = 0; x < 5; ++x)
            for (Index a = 0; a < 3; ++a) {
                const double q = r.values(x, a) + 0.9 * p[static_cast<std::size_t>(a)].row(x).dot(v);
                worst = std::max(worst, std::abs(psi.values(x * 3 + a, 0) - q));
            }
    }
    return verdict("fp-reward-as-feature", worst <= 10 * tol, "max abs diff " + fmt(worst));
}

CheckResult fp1_two_sweeps() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        const Matrix pi = random_policy(5, 3, seed);
        const QDerivative fp1 = fp1_derivative(inst.mdp, inst.features, StochasticPolicy(pi));
        // Sweep 1 from zero gives phi; sweep 2 adds one discounted step of policy-averaged phi.
        const auto p = dense_transitions(inst.mdp);
        const Matrix& phi = inst.features.values();
        Matrix avg = Matrix::Zero(5, phi.cols());
        for (Index y = 0; y < 5; ++y)
            for (Index b = 0; b < 3; ++b) avg.row(y) += pi(y, b) * phi.row(y * 3 + b);
        Matrix two = phi;
        for (Index x = 0; x < 5; ++x)
            for (Index a = 0; a < 3; ++a) two.row(x * 3 + a) += 0.9 * p[static_cast<std::size_t>(a)].row(x) * avg;
        worst = std::max(worst, max_abs(fp1.values - two));
    }
    return verdict("fp1-two-sweeps", worst <= 1e-12, "max abs diff " + fmt(worst));
}

CheckResult pair_likelihood_finite_difference() {
    constexpr double eta = 0.5;
    std::size_t checked = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
        const Instance inst = make_instance(seed, 4, 3, 3, 0.8);
        if (!greedy_locally_constant(inst.mdp, inst.features, inst.theta, kFdStep)) continue;
        const auto lib = library_gradient_inputs(inst, eta);
        for (Index x = 0; x < 4; ++x)
            for (Index a = 0; a < 3; ++a) {
                const Vector g = pair_likelihood_gradient(lib.psi, lib.boltzmann, BoltzmannConfig{eta}, x, a);
                const Vector fd = central_difference(
                    [&](const Vector& t) { return exact_boltzmann(inst.mdp, inst.features, t, eta)(x, a); },
                    inst.theta, kFdStep);
                worst = std::max(worst, relative_error(g, fd, 1e-8));
            }
        ++checked;
    }
    return verdict("pair-likelihood-finite-difference", checked > 0 && worst <= kFdRelTol,
                   std::to_string(checked) + " instances, max rel err " + fmt(worst));
}

CheckResult similarity_finite_difference() {
    constexpr double eta = 0.3;
    std::size_t checked = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 40; seed < 50; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        if (!greedy_locally_constant(inst.mdp, inst.features, inst.theta, kFdStep)) continue;
        const Demonstration demo = random_pairs(5, 3, 25, seed);
        const EmpiricalStats stats = empirical_policy(demo, 5, 3);
        const auto lib = library_gradient_inputs(inst, eta);
        const Vector delta = loglik_gradient(stats, lib.boltzmann, lib.psi, BoltzmannConfig{eta});
        const Vector fd = central_difference(
            [&](const Vector& t) { return exact_similarity(inst.mdp, inst.features, t, eta, demo); },
            inst.theta, kFdStep);
        worst = std::max(worst, relative_error(delta, fd));
        ++checked;
    }
    return verdict("similarity-gradient-finite-difference", checked > 0 && worst <= kFdRelTol,
                   std::to_string(checked) + " instances, max rel err " + fmt(worst));
}

CheckResult pm_gradient_finite_difference() {
    constexpr double eta = 0.3;
    std::size_t checked = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 50; seed < 60; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        if (!greedy_locally_constant(inst.mdp, inst.features, inst.theta, kFdStep)) continue;
        const Demonstration demo = random_pairs(5, 3, 25, seed);
        const EmpiricalStats stats = empirical_policy(demo, 5, 3);
        const auto lib = library_gradient_inputs(inst, eta);
        const Vector ascent = policy_matching_gradient(stats, lib.boltzmann, lib.psi, BoltzmannConfig{eta});
        const Vector fd = central_difference(
            [&](const Vector& t) { return -exact_pm_cost(inst.mdp, inst.features, t, eta, demo); }, inst.theta,
            kFdStep);
        worst = std::max(worst, relative_error(ascent, fd));
        ++checked;
    }
    return verdict("pm-gradient-finite-difference", checked > 0 && worst <= kFdRelTol,
                   std::to_string(checked) + " instances, max rel err " + fmt(worst));
}

CheckResult stationary_direction() {
    // With pi_hat_E equal to the current Boltzmann policy, J(theta') = sum mu pi log pi_theta'
    // peaks at theta' = theta, so every direction is flat to first order.
    constexpr double eta = 0.5;
    const Instance inst = make_instance(3, 3, 3, 3, 0.9);
    const auto lib = library_gradient_inputs(inst, eta);
    EmpiricalStats stats{Vector::Constant(3, 1.0 / 3.0), lib.boltzmann, {true, true, true}, 3};
    const Vector delta = loglik_gradient(stats, lib.boltzmann, lib.psi, BoltzmannConfig{eta});
    auto j_at = [&](const Vector& t) {
        const Matrix pi = exact_boltzmann(inst.mdp, inst.features, t, eta);
        double j = 0.0;
        for (Index x = 0; x < 3; ++x)
            for (Index a = 0; a < 3; ++a) j += stats.visitation(x) * lib.boltzmann(x, a) * std::log(pi(x, a));
        return j;
    };
    const double j0 = j_at(inst.theta);
    constexpr double c = 10.0;
    bool ok = delta.norm() <= 1e-9;
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Vector d(3);
        for (Index k = 0; k < 3; ++k) d(k) = n(gen);
        d.normalize();
        for (double eps : {1e-2, 1e-3}) ok = ok && j_at(inst.theta + eps * d) - j0 <= eps * eps * c;
    }
    return verdict("stationary-direction", ok, "|Delta| = " + fmt(delta.norm()));
}

CheckResult similarity_loglik_identity() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Instance inst = make_instance(seed, 5, 3, 4, 0.9);
        const Demonstration demo = sample_trajectories(inst.mdp, library_greedy(inst), 20, 15, seed);
        const EmpiricalStats stats = empirical_policy(demo, 5, 3);
        const StochasticPolicy pi =
            boltzmann_policy(optimal_q(inst.mdp, assemble_reward(inst.features, inst.theta)), BoltzmannConfig{0.4});
        double direct = 0.0;
        for (const auto& [x, a] : demo.pairs) direct += std::log(pi(x, a));
        worst = std::max(worst, std::abs(static_cast<double>(demo.m()) * similarity_J(stats, pi) - direct));
        worst = std::max(worst, std::abs(log_likelihood(demo, pi) - direct));
    }
    return verdict("similarity-loglik-identity", worst <= 1e-10, "max abs diff " + fmt(worst));
}

CheckResult similarity_temperature_monotone() {
    // Two states, two actions; the demonstrator always takes the greedy action.
    Matrix q(2, 2);
    q << 1.0, 0.2, -0.5, 0.3;
    Demonstration demo;
    demo.pairs = {{0, 0}, {0, 0}, {1, 1}};
    demo.trajectory_lengths = {3};
    const EmpiricalStats stats = empirical_policy(demo, 2, 2);
    double prev = -1e300;
    bool ok = true;
    std::string detail;
    for (double eta : {1.0, 0.5, 0.25}) {
        const double j = similarity_J(stats, boltzmann_policy(QFunction{q}, BoltzmannConfig{eta}));
        ok = ok && j > prev && j < 0.0;
        prev = j;
        detail += fmt(j) + " ";
    }
    return verdict("similarity-temperature-monotone", ok, "J = " + detail);
}

CheckResult girl_self_consistency() {
    constexpr double eta = 0.1;
    const Instance inst = make_instance(4, 3, 3, 3, 0.9);
    const QFunction q = optimal_q(inst.mdp, assemble_reward(inst.features, inst.theta));
    const auto expert_greedy = greedy_policy(q).actions();
    const Demonstration demo =
        sample_trajectories(inst.mdp, boltzmann_policy(q, BoltzmannConfig{eta}), 2000, 30, 99);
    const EmpiricalStats stats = empirical_policy(demo, 3, 3);
    IrlConfig cfg;
    cfg.algorithm = Algorithm::GIRL;
    cfg.temperature = eta;
    cfg.n_iterations = 300;
    const IrlResult result = run_girl(IrlProblem{inst.mdp, inst.features, false}, stats, cfg);
    const auto learned = result.final_greedy.actions();
    std::size_t same = 0;
    for (std::size_t x = 0; x < learned.size(); ++x) same += learned[x] == expert_greedy[x];
    return verdict("girl-self-consistency", same == learned.size(),
                   std::to_string(same) + "/" + std::to_string(learned.size()) + " states match");
}

CheckResult mwal_feature_matching() {
    constexpr double gamma = 0.9;
    const Instance inst = make_instance(8, 3, 3, 2, gamma);
    Vector theta0(2);
    theta0 << 0.7, 0.3;
    const Matrix expert = greedy_policy(optimal_q(inst.mdp, assemble_reward(inst.features, theta0))).probs();
    const Matrix psi = exact_feature_expectations(inst.mdp, inst.features, expert);
    Vector mu_expert = Vector::Zero(2);
    for (Index x = 0; x < 3; ++x)
        for (Index a = 0; a < 3; ++a) mu_expert += inst.mdp.initial_dist()(x) * expert(x, a) * psi.row(x * 3 + a).transpose();

    Demonstration demo;
    demo.pairs = {{0, 0}};
    demo.trajectory_lengths = {1};
    IrlConfig cfg;
    cfg.algorithm = Algorithm::MWAL;
    cfg.n_iterations = 200;
    const IrlResult result =
        run_mwal(IrlProblem{inst.mdp, inst.features, false}, empirical_policy(demo, 3, 3), mu_expert, cfg);

    // Multiplicative-weights regret: every scaled feature gap is at least -4 (sqrt(2 ln k / T) + ln k / T).
    const double k = 2.0, t = static_cast<double>(cfg.n_iterations);
    const double bound = 4.0 * (std::sqrt(2.0 * std::log(k) / t) + std::log(k) / t);
    double worst = 1e300;
    for (Index i = 0; i < 2; ++i) {
        const auto col = inst.features.values().col(i);
        const double scale = 1.0 / (col.maxCoeff() - col.minCoeff());
        worst = std::min(worst, (1.0 - gamma) * scale * (result.mixture_feature_expectations(i) - mu_expert(i)));
    }
    return verdict("mwal-feature-matching", worst >= -bound,
                   "min scaled gap " + fmt(worst) + ", bound -" + fmt(bound));
}

CheckResult sailing_heading_one_hot() {
    const SailingSpec spec = sailing_spec(5);
    const EnvironmentBundle env = build_sailing(spec);
    const Index goal = sailing_goal_state(spec);
    std::size_t bad = 0, scanned = 0;
    for (Index x = 0; x < env.mdp.n_states(); ++x) {
        // The goal state and every grid state on the goal cell carry no features.
        bool terminal = x == goal || env.mdp.is_absorbing(x);
        if (!terminal) {
            const SailingState s = decode_sailing_state(spec, x);
            terminal = s.row == spec.goal.row && s.col == spec.goal.col;
        }
        for (Index a = 0; a < env.mdp.n_actions(); ++a) {
            ++scanned;
            double heading_sum = 0.0;
            bool binary = true;
            for (Index k = 0; k < 6; ++k) {
                const double f = env.features(x, a, k);
                binary = binary && (f == 0.0 || f == 1.0);
                if (k < 5) heading_sum += f;
            }
            if (terminal) {
                bad += heading_sum != 0.0 || env.features(x, a, kDelay) != 0.0;
                continue;
            }
            const SailingState s = decode_sailing_state(spec, x);
            const double delay = next_tack(a, s.wind, s.tack) != s.tack ? 1.0 : 0.0;
            bad += !binary || heading_sum != 1.0 || env.features(x, a, heading_class(a, s.wind)) != 1.0 ||
                   env.features(x, a, kDelay) != delay;
        }
    }
    return verdict("sailing-heading-one-hot", bad == 0,
                   std::to_string(scanned) + " pairs scanned, " + std::to_string(bad) + " bad");
}

CheckResult grid_myopic_greedy() {
    GridWorldSpec spec = narrow_passage_spec(2);
    spec.success_prob = 1.0;
    spec.discount = 0.0;
    const EnvironmentBundle env = build_grid_world(spec);
    const RewardTable r = env.true_reward();
    const auto greedy = greedy_policy(optimal_q(env.mdp, r)).actions();
    std::size_t bad = 0;
    for (Index x = 0; x < env.mdp.n_states(); ++x) {
        const double chosen = r.values(x, greedy[static_cast<std::size_t>(x)]);
        for (Index a = 0; a < 5; ++a) bad += r.values(x, a) > chosen;
    }
    return verdict("grid-myopic-greedy", bad == 0, std::to_string(bad) + " states beaten by another action");
}

CheckResult visitation_recount() {
    const Instance inst = make_instance(12, 6, 3, 2, 0.9);
    const Demonstration demo = sample_trajectories(inst.mdp, StochasticPolicy::uniform(6, 3), 50, 20, 3);
    const Vector mu = empirical_visitation(demo, 6);
    std::map<Index, std::size_t> counts;
    for (const auto& pair : demo.pairs) ++counts[pair.state];
    double worst = std::abs(mu.sum() - 1.0);
    for (Index x = 0; x < 6; ++x) {
        const double expected = static_cast<double>(counts[x]) / static_cast<double>(demo.m());
        worst = std::max(worst, std::abs(mu(x) - expected));
    }
    const EmpiricalStats stats = empirical_policy(demo, 6, 3);
    double row_err = 0.0;
    for (Index x = 0; x < 6; ++x) row_err = std::max(row_err, std::abs(stats.policy.probs().row(x).sum() - 1.0));
    return verdict("visitation-recount", worst <= 1e-12 && row_err <= 1e-12,
                   "max diff " + fmt(worst) + ", max row-sum err " + fmt(row_err));
}

CheckResult summary_round_trip() {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(-50.0, 1.0), p(0.0, 1.0);
    std::vector<MetricsRow> rows;
    for (const char* algo : {"GIRL", "PM"}) {
        for (std::size_t run = 0; run < 4; ++run) {
            for (std::size_t it = 0; it < 5; ++it) {
                MetricsRow r;
                r.run_id = run;
                r.algorithm = algo;
                r.estimator = "FP";
                r.iteration = it;
                r.loglik = u(gen) * 10.0;
                r.similarity_J = u(gen) / 50.0;
                r.value_true = u(gen);
                r.value_expert = 1.0;
                r.policy_agreement = p(gen);
                r.iter_wall_ms = p(gen) * 100.0;
                rows.push_back(r);
            }
        }
    }
    const auto before = summarize(rows);
    std::stringstream buffer;
    write_iterations_csv(buffer, rows);
    const auto after = summarize(read_iterations_csv(buffer));
    double worst = 0.0;
    bool same_shape = before.size() == after.size();
    for (std::size_t i = 0; same_shape && i < before.size(); ++i) {
        const auto& a = before[i];
        const auto& b = after[i];
        for (double d : {a.mean_value_true - b.mean_value_true, a.sd_value_true - b.sd_value_true,
                         a.mean_agreement - b.mean_agreement, a.sd_agreement - b.sd_agreement,
                         a.mean_total_s - b.mean_total_s}) {
            worst = std::max(worst, std::abs(d));
        }
        same_shape = a.n_repeats == b.n_repeats && a.algorithm == b.algorithm;
    }
    return verdict("summary-round-trip", same_shape && worst <= 1e-12, "max abs diff " + fmt(worst));
}

} // namespace

const std::vector<NamedCheck>& all_checks() {
    static const std::vector<NamedCheck> checks{
        {"fp-gradient-vs-finite-difference", gradient_oracle_check},
        {"fp-ia-identity", fp_ia_identity_check},
        {"fp-monte-carlo", fp_monte_carlo_check},
        {"value-iteration-vs-linear-solve", value_iteration_vs_linear_solve},
        {"q-from-v-consistency", q_from_v_consistency},
        {"greedy-fixed-point", greedy_fixed_point},
        {"greedy-brute-force", greedy_brute_force},
        {"boltzmann-closed-form", boltzmann_closed_form},
        {"policy-evaluation-monte-carlo", policy_evaluation_monte_carlo},
        {"simplex-projection-brute-force", simplex_projection_brute_force},
        {"fp-reward-as-feature", fp_reward_as_feature},
        {"fp1-two-sweeps", fp1_two_sweeps},
        {"pair-likelihood-finite-difference", pair_likelihood_finite_difference},
        {"similarity-gradient-finite-difference", similarity_finite_difference},
        {"pm-gradient-finite-difference", pm_gradient_finite_difference},
        {"stationary-direction", stationary_direction},
        {"similarity-loglik-identity", similarity_loglik_identity},
        {"similarity-temperature-monotone", similarity_temperature_monotone},
        {"girl-self-consistency", girl_self_consistency},
        {"mwal-feature-matching", mwal_feature_matching},
        {"sailing-heading-one-hot", sailing_heading_one_hot},
        {"grid-myopic-greedy", grid_myopic_greedy},
        {"visitation-recount", visitation_recount},
        {"summary-round-trip", summary_round_trip},
    };
    return checks;
}

CheckResult run_check(const NamedCheck& check) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult result;
    try {
        result = check.run();
    } catch (const std::exception& e) {
        result = CheckResult{check.name, false, std::string("threw: ") + e.what(), 0.0};
    }
    result.name = check.name;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::size_t run_suite(std::ostream* log) {
    std::size_t failures = 0;
    for (const auto& check : all_checks()) {
        const CheckResult r = run_check(check);
        failures += !r.passed;
        if (log) {
            *log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " (" << fmt(r.seconds)
                 << " s)\n";
        }
    }
    return failures;
}

} // namespace mlirl::oracle
