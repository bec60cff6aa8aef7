#include <doctest.h>

#include "mlirl/errors.hpp"
#include "mlirl/features.hpp"
#include "oracles.hpp"

#include <random>

using namespace mlirl;

TEST_CASE("assemble_reward is the weighted feature sum") {
    const FeatureMap phi = oracle::random_features(4, 3, 5, 2);
    CHECK(assemble_reward(phi, Vector::Zero(5)).values.cwiseAbs().maxCoeff() == 0.0);

    const Vector theta = oracle::random_l1_weights(5, 2);
    const RewardTable r = assemble_reward(phi, theta);
    for (Index x = 0; x < 4; ++x)
        for (Index a = 0; a < 3; ++a) {
            double expected = 0.0;
            for (Index k = 0; k < 5; ++k) expected += theta(k) * phi(x, a, k);
            CHECK(r.values(x, a) == doctest::Approx(expected).epsilon(1e-14));
        }
    const RewardTable scaled = assemble_reward(phi, Vector(-3.5 * theta));
    CHECK((scaled.values + 3.5 * r.values).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK_THROWS_AS(assemble_reward(phi, Vector::Zero(4)), DimensionError);
}

TEST_CASE("indicator features follow the partition") {
    const FeatureMap phi = indicator_features(4, 2, {0, 0, 1, 1}, 2);
    for (Index x = 0; x < 4; ++x)
        for (Index a = 0; a < 2; ++a) {
            CHECK(phi(x, a, 0) + phi(x, a, 1) == 1.0);
            CHECK(phi(x, a, x < 2 ? 0 : 1) == 1.0);
        }
    const FeatureMap identity = indicator_features(3, 2, {0, 1, 2}, 3);
    for (Index x = 0; x < 3; ++x)
        for (Index k = 0; k < 3; ++k) CHECK(identity(x, 1, k) == (x == k ? 1.0 : 0.0));

    // One-hot on feature k selects that cell's indicator as the reward.
    Vector onehot = Vector::Zero(2);
    onehot(1) = 1.0;
    const RewardTable r = assemble_reward(phi, onehot);
    CHECK(r.values(0, 0) == 0.0);
    CHECK(r.values(3, 1) == 1.0);
    CHECK_THROWS_AS(indicator_features(2, 1, {0, 2}, 2), DimensionError);
}

TEST_CASE("project_weights examples") {
    Vector v(3);
    v << 2, 0, 0;
    const auto s = project_weights(v, ConstraintMode::NonnegSimplex).theta();
    CHECK(s(0) == 1.0);
    CHECK(s(1) == 0.0);
    CHECK(s(2) == 0.0);

    Vector w(2);
    w << -3, 1;
    const auto l1 = project_weights(w, ConstraintMode::L1Sphere).theta();
    CHECK(l1(0) == doctest::Approx(-0.75));
    CHECK(l1(1) == doctest::Approx(0.25));

    CHECK(project_weights(w, ConstraintMode::Unconstrained).theta() == w);
    CHECK_THROWS(project_weights(Vector::Zero(3), ConstraintMode::L1Sphere));
}

TEST_CASE("projection output always satisfies its mode") {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        Vector v(1 + trial % 7);
        for (Index i = 0; i < v.size(); ++i) v(i) = n(gen);
        const auto simplex = project_weights(v, ConstraintMode::NonnegSimplex).theta();
        CHECK(std::abs(simplex.sum() - 1.0) <= 1e-10);
        CHECK(simplex.minCoeff() >= 0.0);
        const auto sphere = project_weights(v, ConstraintMode::L1Sphere).theta();
        CHECK(std::abs(sphere.cwiseAbs().sum() - 1.0) <= 1e-10);
    }
}

TEST_CASE("simplex projection beats brute force on 3-vectors") {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vector v(3);
        for (Index i = 0; i < 3; ++i) v(i) = n(gen);
        const Vector p = project_to_simplex(v);
        const Vector brute = oracle::brute_force_simplex_projection(v, 1e-3);
        CHECK((p - brute).cwiseAbs().maxCoeff() <= 1e-3);
        CHECK((p - v).squaredNorm() <= (brute - v).squaredNorm() + 1e-15);
    }
}

TEST_CASE("weight vectors enforce their invariants") {
    Vector bad(2);
    bad << 0.5, 0.4;
    CHECK_THROWS_AS(WeightVector(bad, ConstraintMode::L1Sphere), InvariantError);
    bad << 1.5, -0.5;
    CHECK_THROWS_AS(WeightVector(bad, ConstraintMode::NonnegSimplex), InvariantError);
    CHECK_NOTHROW(WeightVector(bad, ConstraintMode::Unconstrained));
}

TEST_CASE("initial weights are uniform with the cost sign") {
    const auto w = initial_weights(4, ConstraintMode::L1Sphere, false).theta();
    CHECK(w == Vector::Constant(4, 0.25));
    const auto c = initial_weights(4, ConstraintMode::L1Sphere, true).theta();
    CHECK(c == Vector::Constant(4, -0.25));
    // The simplex admits no negative start.
    CHECK(initial_weights(4, ConstraintMode::NonnegSimplex, true).theta() == Vector::Constant(4, 0.25));
}

TEST_CASE("constraint mode names round-trip") {
    for (auto mode : {ConstraintMode::L1Sphere, ConstraintMode::NonnegSimplex, ConstraintMode::Unconstrained}) {
        CHECK(parse_constraint_mode(to_string(mode)) == mode);
    }
    CHECK_THROWS_AS(parse_constraint_mode("l2"), ConfigError);
}
