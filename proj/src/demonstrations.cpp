#include "mlirl/demonstrations.hpp"

#include "mlirl/csv.hpp"
#include "mlirl/errors.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace mlirl {

std::size_t default_horizon(double discount) {
    if (discount <= 0.0) return 1;
    std::size_t h = 1;
    double g = discount;
    while (g >= 1e-3) {
        g *= discount;
        ++h;
    }
    return h;
}

Demonstration sample_trajectories(const TabularMdp& mdp, const StochasticPolicy& policy,
                                  std::size_t n_traj, std::size_t horizon, std::uint64_t seed) {
    check_dimensions(mdp, policy);
    if (horizon < 1) throw ConfigError("sample_trajectories: horizon must be at least 1");

    std::vector<bool> absorbing(static_cast<std::size_t>(mdp.n_states()));
    for (Index x = 0; x < mdp.n_states(); ++x) absorbing[static_cast<std::size_t>(x)] = mdp.is_absorbing(x);

    // Successor lists per (state, action) for sampling.
    const auto& p = mdp.transitions();
    Rng rng(seed);
    Demonstration demo;
    demo.pairs.reserve(n_traj * horizon);
    std::vector<double> row_probs;
    std::vector<Index> row_next;
    for (std::size_t traj = 0; traj < n_traj; ++traj) {
        Index x = rng.categorical(mdp.initial_dist());
        std::size_t length = 0;
        for (std::size_t t = 0; t < horizon; ++t) {
            if (absorbing[static_cast<std::size_t>(x)]) break;
            const Index a = rng.categorical(policy.probs().row(x));
            demo.pairs.push_back({x, a});
            ++length;
            row_probs.clear();
            row_next.clear();
            for (TransitionMatrix::InnerIterator it(p, mdp.row(x, a)); it; ++it) {
                row_next.push_back(it.col());
                row_probs.push_back(it.value());
            }
            x = row_next[static_cast<std::size_t>(rng.categorical(row_probs))];
        }
        demo.trajectory_lengths.push_back(length);
    }
    return demo;
}

Vector empirical_visitation(const Demonstration& demo, Index n_states) {
    if (demo.m() == 0) throw ConfigError("empirical_visitation: empty demonstration");
    Vector counts = Vector::Zero(n_states);
    for (const auto& [x, a] : demo.pairs) {
        if (x < 0 || x >= n_states) throw DimensionError("empirical_visitation: state out of range");
        counts(x) += 1.0;
    }
    return counts / static_cast<double>(demo.m());
}

EmpiricalStats empirical_policy(const Demonstration& demo, Index n_states, Index n_actions) {
    if (demo.m() == 0) throw ConfigError("empirical_policy: empty demonstration");
    Matrix counts = Matrix::Zero(n_states, n_actions);
    for (const auto& [x, a] : demo.pairs) {
        if (x < 0 || x >= n_states || a < 0 || a >= n_actions) {
            throw DimensionError("empirical_policy: pair out of range");
        }
        counts(x, a) += 1.0;
    }
    EmpiricalStats stats;
    stats.visited.assign(static_cast<std::size_t>(n_states), false);
    Matrix probs(n_states, n_actions);
    for (Index x = 0; x < n_states; ++x) {
        const double total = counts.row(x).sum();
        if (total > 0.0) {
            probs.row(x) = counts.row(x) / total;
            stats.visited[static_cast<std::size_t>(x)] = true;
        } else {
            probs.row(x).setConstant(1.0 / static_cast<double>(n_actions));
        }
    }
    stats.policy = StochasticPolicy(std::move(probs));
    stats.visitation = empirical_visitation(demo, n_states);
    stats.n_pairs = demo.m();
    return stats;
}

Vector empirical_feature_expectations(const Demonstration& demo, const FeatureMap& features,
                                      double discount) {
    if (demo.trajectory_lengths.empty()) {
        throw ConfigError("empirical_feature_expectations: demonstration has no trajectories");
    }
    Vector total = Vector::Zero(features.n_features());
    std::size_t i = 0;
    for (const std::size_t length : demo.trajectory_lengths) {
        double weight = 1.0;
        for (std::size_t t = 0; t < length; ++t, ++i) {
            const auto& [x, a] = demo.pairs.at(i);
            total += weight * features.values().row(x * features.n_actions() + a).transpose();
            weight *= discount;
        }
    }
    return total / static_cast<double>(demo.trajectory_lengths.size());
}

void write_demonstration(std::ostream& out, const Demonstration& demo) {
    out << "M " << demo.m() << "\n";
    out << "trajectories " << demo.trajectory_lengths.size();
    for (auto len : demo.trajectory_lengths) out << ' ' << len;
    out << "\n";
    for (const auto& [x, a] : demo.pairs) out << x << ' ' << a << "\n";
    if (!out) throw IoError("demonstration: write failed");
}

Demonstration read_demonstration(std::istream& in) {
    std::string keyword;
    std::size_t m = 0;
    if (!(in >> keyword >> m) || keyword != "M") throw IoError("demonstration: missing 'M <count>' header");
    std::size_t k = 0;
    if (!(in >> keyword >> k) || keyword != "trajectories") {
        throw IoError("demonstration: missing 'trajectories' header");
    }
    Demonstration demo;
    demo.trajectory_lengths.resize(k);
    for (auto& len : demo.trajectory_lengths) {
        if (!(in >> len)) throw IoError("demonstration: truncated trajectory lengths");
    }
    if (std::accumulate(demo.trajectory_lengths.begin(), demo.trajectory_lengths.end(), std::size_t{0}) != m) {
        throw IoError("demonstration: trajectory lengths do not sum to M");
    }
    demo.pairs.resize(m);
    for (auto& [x, a] : demo.pairs) {
        if (!(in >> x >> a)) throw IoError("demonstration: truncated pair list");
        if (x < 0 || a < 0) throw IoError("demonstration: negative index");
    }
    return demo;
}

} // namespace mlirl
