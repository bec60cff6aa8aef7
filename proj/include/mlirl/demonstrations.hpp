#pragma once

#include "mlirl/features.hpp"
#include "mlirl/mdp.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace mlirl {

struct StateAction {
    Index state;
    Index action;

    friend bool operator==(const StateAction&, const StateAction&) = default;
};

/// Expert observations D = {(x_i, a_i)}, kept grouped by trajectory.
struct Demonstration {
    std::vector<StateAction> pairs;
    /// Number of pairs contributed by each trajectory, in order; sums to m().
    std::vector<std::size_t> trajectory_lengths;

    std::size_t m() const noexcept { return pairs.size(); }

    friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

/// mu_E, pi_hat_E and the visited flags derived from a demonstration.
struct EmpiricalStats {
    Vector visitation;
    StochasticPolicy policy;
    std::vector<bool> visited;
    std::size_t n_pairs = 0;
};

/**
 * Pseudo-random source shared by every sampler: mt19937_64 (fully specified by
 * the C++ standard) with doubles built from the top 53 bits, so streams are
 * identical across platforms and standard libraries.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Index drawn from a discrete distribution given by nonnegative weights summing to 1.
    template <class Weights>
    Index categorical(const Weights& probs) {
        const double u = uniform();
        double cumulative = 0.0;
        Index last = 0;
        for (Index i = 0; i < static_cast<Index>(probs.size()); ++i) {
            if (probs[i] <= 0.0) continue;
            cumulative += probs[i];
            last = i;
            if (u < cumulative) return i;
        }
        return last;
    }

private:
    std::mt19937_64 engine_;
};

/// Smallest H with gamma^H < 1e-3 (1 when gamma is 0).
std::size_t default_horizon(double discount);

/// n_traj rollouts of at most `horizon` steps; a rollout stops on entering an absorbing state.
Demonstration sample_trajectories(const TabularMdp& mdp, const StochasticPolicy& policy,
                                  std::size_t n_traj, std::size_t horizon, std::uint64_t seed);

Vector empirical_visitation(const Demonstration& demo, Index n_states);

/// Visited rows are count ratios; unvisited rows are uniform.
EmpiricalStats empirical_policy(const Demonstration& demo, Index n_states, Index n_actions);

/// Average over trajectories of sum_t gamma^t phi(x_t, a_t).
Vector empirical_feature_expectations(const Demonstration& demo, const FeatureMap& features,
                                      double discount);

/// Plain text: "M <m>", "trajectories <k> <len>...", then one "state action" line per pair.
void write_demonstration(std::ostream& out, const Demonstration& demo);
Demonstration read_demonstration(std::istream& in);

} // namespace mlirl
