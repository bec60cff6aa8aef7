#include <doctest.h>

#include "mlirl/demonstrations.hpp"
#include "mlirl/environments.hpp"
#include "mlirl/errors.hpp"
#include "mlirl/metrics.hpp"
#include "oracles.hpp"

#include <cmath>
#include <sstream>

using namespace mlirl;

namespace {

Demonstration from_pairs(std::vector<StateAction> pairs) {
    Demonstration d;
    d.trajectory_lengths = {pairs.size()};
    d.pairs = std::move(pairs);
    return d;
}

} // namespace

TEST_CASE("forced dynamics give identical trajectories") {
    // Two states swapping deterministically, starting in state 0.
    const TabularMdp mdp(2, 1, {{0, 0, 1, 1.0}, {1, 0, 0, 1.0}}, 0.9, Vector::Unit(2, 0));
    const Demonstration demo = sample_trajectories(mdp, StochasticPolicy::uniform(2, 1), 2, 3, 0);
    REQUIRE(demo.m() == 6);
    const std::vector<Index> expected{0, 1, 0, 0, 1, 0};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(demo.pairs[i].state == expected[i]);
        CHECK(demo.pairs[i].action == 0);
    }
    CHECK(demo.trajectory_lengths == std::vector<std::size_t>{3, 3});
}

TEST_CASE("sampling is deterministic in the seed") {
    const TabularMdp mdp = oracle::random_mdp(6, 3, 0.9, 1);
    const auto pi = StochasticPolicy::uniform(6, 3);
    CHECK(sample_trajectories(mdp, pi, 10, 12, 42) == sample_trajectories(mdp, pi, 10, 12, 42));
    CHECK_FALSE(sample_trajectories(mdp, pi, 10, 12, 42) == sample_trajectories(mdp, pi, 10, 12, 43));
    CHECK_THROWS_AS(sample_trajectories(mdp, pi, 1, 0, 0), ConfigError);
}

TEST_CASE("trajectories stop at absorbing states") {
    // State 0 moves to absorbing state 1.
    const TabularMdp mdp(2, 1, {{0, 0, 1, 1.0}, {1, 0, 1, 1.0}}, 0.9, Vector::Unit(2, 0));
    const Demonstration demo = sample_trajectories(mdp, StochasticPolicy::uniform(2, 1), 3, 10, 5);
    CHECK(demo.m() == 3);
    CHECK(demo.trajectory_lengths == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("default horizon") {
    CHECK(std::pow(0.95, static_cast<double>(default_horizon(0.95))) < 1e-3);
    CHECK(std::pow(0.95, static_cast<double>(default_horizon(0.95) - 1)) >= 1e-3);
    CHECK(default_horizon(0.0) == 1);
}

TEST_CASE("empirical visitation counts states") {
    const auto demo = from_pairs({{0, 0}, {0, 1}, {1, 0}});
    const Vector mu = empirical_visitation(demo, 2);
    CHECK(mu(0) == doctest::Approx(2.0 / 3.0));
    CHECK(mu(1) == doctest::Approx(1.0 / 3.0));
    const Vector one = empirical_visitation(from_pairs({{2, 0}, {2, 1}}), 3);
    CHECK(one == Vector::Unit(3, 2));
    CHECK_THROWS_AS(empirical_visitation(Demonstration{}, 2), ConfigError);
    CHECK_THROWS_AS(empirical_visitation(from_pairs({{5, 0}}), 2), DimensionError);
}

TEST_CASE("empirical policy ratios and the unvisited random walk") {
    const auto demo = from_pairs({{0, 0}, {0, 0}, {0, 1}});
    const EmpiricalStats s = empirical_policy(demo, 2, 5);
    CHECK(s.policy(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(s.policy(0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(s.policy(0, 2) == 0.0);
    for (Index a = 0; a < 5; ++a) CHECK(s.policy(1, a) == 0.2);
    CHECK(s.visited == std::vector<bool>{true, false});
    CHECK(s.n_pairs == 3);
    CHECK(s.visitation(1) == 0.0);
}

TEST_CASE("empirical policy rows are exact count ratios") {
    const TabularMdp mdp = oracle::random_mdp(7, 4, 0.9, 3);
    const Demonstration demo = sample_trajectories(mdp, StochasticPolicy::uniform(7, 4), 30, 25, 8);
    const EmpiricalStats s = empirical_policy(demo, 7, 4);
    std::vector<double> count(7, 0.0);
    for (const auto& p : demo.pairs) count[p.state] += 1.0;
    for (Index x = 0; x < 7; ++x) {
        CHECK(std::abs(s.policy.probs().row(x).sum() - 1.0) <= 1e-12);
        if (!s.visited[x]) continue;
        for (Index a = 0; a < 4; ++a) {
            const double scaled = s.policy(x, a) * count[x];
            CHECK(std::abs(scaled - std::round(scaled)) <= 1e-9);
        }
    }
}

TEST_CASE("more data moves the empirical policy toward the sampling policy") {
    const TabularMdp mdp = oracle::random_mdp(5, 3, 0.9, 10);
    const Matrix target = oracle::softmax_rows(oracle::random_features(5, 3, 1, 10).values().reshaped<Eigen::RowMajor>(5, 3), 0.3);
    const StochasticPolicy pi(target);
    double small = 0.0, large = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        small += (empirical_policy(sample_trajectories(mdp, pi, 5, 20, seed), 5, 3).policy.probs() - target)
                     .cwiseAbs()
                     .maxCoeff();
        large += (empirical_policy(sample_trajectories(mdp, pi, 500, 20, seed), 5, 3).policy.probs() - target)
                     .cwiseAbs()
                     .maxCoeff();
    }
    CHECK(large < small);
}

TEST_CASE("greedy expert demonstrations recover the expert on well-visited states") {
    const EnvironmentBundle env = build_environment("narrow-passage-2x2");
    const ExpertSolution expert = solve_expert(env);
    const Demonstration demo =
        sample_trajectories(env.mdp, expert.greedy, 5120, default_horizon(env.mdp.discount()), 1);
    const EmpiricalStats s = empirical_policy(demo, env.mdp.n_states(), env.mdp.n_actions());
    const auto greedy = expert.greedy.actions();
    const auto learned = s.policy.actions();
    std::size_t checked = 0, agree = 0;
    for (Index x = 0; x < env.mdp.n_states(); ++x) {
        if (s.visitation(x) * static_cast<double>(demo.m()) < 50.0) continue;
        ++checked;
        agree += learned[x] == greedy[x];
    }
    REQUIRE(checked > 0);
    CHECK(static_cast<double>(agree) >= 0.99 * static_cast<double>(checked));
}

TEST_CASE("empirical feature expectations discount within each trajectory") {
    const FeatureMap phi(2, 1, Matrix::Identity(2, 2));
    Demonstration demo;
    demo.pairs = {{0, 0}, {1, 0}, {1, 0}};
    demo.trajectory_lengths = {2, 1};
    const Vector mu = empirical_feature_expectations(demo, phi, 0.5);
    // Trajectory 1: phi0 + 0.5 phi1; trajectory 2: phi1. Averaged over 2 trajectories.
    CHECK(mu(0) == doctest::Approx(0.5));
    CHECK(mu(1) == doctest::Approx(0.75));
}

TEST_CASE("demonstration text round trip") {
    const TabularMdp mdp = oracle::random_mdp(4, 3, 0.9, 2);
    const Demonstration demo = sample_trajectories(mdp, StochasticPolicy::uniform(4, 3), 4, 6, 11);
    std::stringstream buffer;
    write_demonstration(buffer, demo);
    CHECK(read_demonstration(buffer) == demo);
    std::istringstream bad("M 3\ntrajectories 1 3\n0 0\n");
    CHECK_THROWS_AS(read_demonstration(bad), IoError);
}
