#include "oracles.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace mlirl::oracle {

TabularMdp random_mdp(Index n_states, Index n_actions, double discount, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::exponential_distribution<double> draw(1.0);
    std::vector<double> tensor(static_cast<std::size_t>(n_states * n_actions * n_states));
    for (Index row = 0; row < n_states * n_actions; ++row) {
        double total = 0.0;
        for (Index y = 0; y < n_states; ++y) {
            const double w = draw(gen);
            tensor[static_cast<std::size_t>(row * n_states + y)] = w;
            total += w;
        }
        for (Index y = 0; y < n_states; ++y) tensor[static_cast<std::size_t>(row * n_states + y)] /= total;
    }
    Vector init(n_states);
    for (Index x = 0; x < n_states; ++x) init(x) = draw(gen);
    init /= init.sum();
    return TabularMdp::from_dense(n_states, n_actions, tensor, discount, init);
}

FeatureMap random_features(Index n_states, Index n_actions, Index n_features, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix phi(n_states * n_actions, n_features);
    for (Index i = 0; i < phi.rows(); ++i)
        for (Index k = 0; k < n_features; ++k) phi(i, k) = u(gen);
    return FeatureMap(n_states, n_actions, phi);
}

Vector random_l1_weights(Index n, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ 0x51afd7ed558ccd00ULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector theta(n);
    for (Index k = 0; k < n; ++k) theta(k) = u(gen);
    return theta / theta.cwiseAbs().sum();
}

Demonstration random_pairs(Index n_states, Index n_actions, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ 0x2545f4914f6cdd1dULL);
    std::uniform_int_distribution<Index> xs(0, n_states - 1), as(0, n_actions - 1);
    Demonstration demo;
    for (std::size_t i = 0; i < m; ++i) demo.pairs.push_back({xs(gen), as(gen)});
    demo.trajectory_lengths.push_back(m);
    return demo;
}

std::vector<Matrix> dense_transitions(const TabularMdp& mdp) {
    const Index n = mdp.n_states();
    std::vector<Matrix> p(static_cast<std::size_t>(mdp.n_actions()), Matrix::Zero(n, n));
    for (const auto& t : mdp.transition_list()) p[static_cast<std::size_t>(t.action)](t.state, t.next) += t.prob;
    return p;
}

std::vector<Index> argmax_rows(const Matrix& q, double tie_tol) {
    std::vector<Index> out(static_cast<std::size_t>(q.rows()));
    for (Index x = 0; x < q.rows(); ++x) {
        const double top = q.row(x).maxCoeff();
        Index a = 0;
        while (q(x, a) < top - tie_tol) ++a;
        out[static_cast<std::size_t>(x)] = a;
    }
    return out;
}

Matrix softmax_rows(const Matrix& q, double temperature) {
    Matrix out(q.rows(), q.cols());
    for (Index x = 0; x < q.rows(); ++x) {
        const double top = q.row(x).maxCoeff();
        double z = 0.0;
        for (Index a = 0; a < q.cols(); ++a) z += (out(x, a) = std::exp((q(x, a) - top) / temperature));
        out.row(x) /= z;
    }
    return out;
}

Vector exact_policy_value(const TabularMdp& mdp, const Matrix& reward, const Matrix& policy) {
    const auto p = dense_transitions(mdp);
    const Index n = mdp.n_states();
    Matrix p_pi = Matrix::Zero(n, n);
    Vector r_pi = Vector::Zero(n);
    for (Index x = 0; x < n; ++x) {
        for (Index a = 0; a < mdp.n_actions(); ++a) {
            p_pi.row(x) += policy(x, a) * p[static_cast<std::size_t>(a)].row(x);
            r_pi(x) += policy(x, a) * reward(x, a);
        }
    }
    const Matrix system = Matrix::Identity(n, n) - mdp.discount() * p_pi;
    return Eigen::FullPivLU<Matrix>(system).solve(r_pi);
}

Matrix exact_optimal_q(const TabularMdp& mdp, const Matrix& reward) {
    const auto p = dense_transitions(mdp);
    const Index n = mdp.n_states();
    const Index na = mdp.n_actions();
    auto q_of = [&](const Vector& v) {
        Matrix q(n, na);
        for (Index a = 0; a < na; ++a) q.col(a) = reward.col(a) + mdp.discount() * p[static_cast<std::size_t>(a)] * v;
        return q;
    };
    std::vector<Index> pi = argmax_rows(reward, 0.0);
    for (int round = 0; round < 10000; ++round) {
        Matrix policy = Matrix::Zero(n, na);
        for (Index x = 0; x < n; ++x) policy(x, pi[static_cast<std::size_t>(x)]) = 1.0;
        const Vector v = exact_policy_value(mdp, reward, policy);
        const Matrix q = q_of(v);
        // Switch only on strict improvement so the loop cannot cycle between tied actions.
        bool changed = false;
        for (Index x = 0; x < n; ++x) {
            const Index cur = pi[static_cast<std::size_t>(x)];
            Index best = cur;
            for (Index a = 0; a < na; ++a) {
                if (q(x, a) > q(x, best) + 1e-12 * std::max(1.0, std::abs(q(x, best)))) best = a;
            }
            if (best != cur) {
                pi[static_cast<std::size_t>(x)] = best;
                changed = true;
            }
        }
        if (!changed) return q;
    }
    throw std::runtime_error("exact_optimal_q: policy iteration did not stabilize");
}

Matrix exact_feature_expectations(const TabularMdp& mdp, const FeatureMap& features, const Matrix& policy) {
    const auto p = dense_transitions(mdp);
    const Index n = mdp.n_states();
    const Index na = mdp.n_actions();
    const Index rows = n * na;
    // M((x,a),(y,b)) = P(y|x,a) pi(b|y)
    Matrix lifted = Matrix::Zero(rows, rows);
    for (Index x = 0; x < n; ++x)
        for (Index a = 0; a < na; ++a)
            for (Index y = 0; y < n; ++y)
                for (Index b = 0; b < na; ++b)
                    lifted(x * na + a, y * na + b) = p[static_cast<std::size_t>(a)](x, y) * policy(y, b);
    const Matrix system = Matrix::Identity(rows, rows) - mdp.discount() * lifted;
    return Eigen::FullPivLU<Matrix>(system).solve(features.values());
}

namespace {

// Flat cumulative tables so rollouts avoid per-step Eigen temporaries.
struct Sampler {
    Index n, na;
    std::vector<double> next_cdf;   // (x * na + a) * n + y
    std::vector<double> action_cdf; // x * na + a

    Sampler(const TabularMdp& mdp, const Matrix& policy)
        : n(mdp.n_states()), na(mdp.n_actions()),
          next_cdf(static_cast<std::size_t>(n * na * n)), action_cdf(static_cast<std::size_t>(n * na)) {
        const auto p = dense_transitions(mdp);
        for (Index x = 0; x < n; ++x) {
            double ca = 0.0;
            for (Index a = 0; a < na; ++a) {
                ca += policy(x, a);
                action_cdf[static_cast<std::size_t>(x * na + a)] = ca;
                double c = 0.0;
                for (Index y = 0; y < n; ++y) {
                    c += p[static_cast<std::size_t>(a)](x, y);
                    next_cdf[static_cast<std::size_t>((x * na + a) * n + y)] = c;
                }
            }
        }
    }

    static Index pick(const double* cdf, Index size, double r) {
        for (Index i = 0; i + 1 < size; ++i)
            if (r < cdf[i]) return i;
        return size - 1;
    }
    Index next(Index x, Index a, double r) const { return pick(&next_cdf[static_cast<std::size_t>((x * na + a) * n)], n, r); }
    Index action(Index x, double r) const { return pick(&action_cdf[static_cast<std::size_t>(x * na)], na, r); }
};

} // namespace

Matrix monte_carlo_feature_expectations(const TabularMdp& mdp, const FeatureMap& features,
                                        const Matrix& policy, std::size_t rollouts,
                                        std::size_t horizon, std::uint64_t seed) {
    const Sampler sampler(mdp, policy);
    const Index n = mdp.n_states();
    const Index na = mdp.n_actions();
    const Index k = features.n_features();
    const double gamma = mdp.discount();
    const Matrix phi = features.values();
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix out = Matrix::Zero(n * na, k);
    std::vector<double> total(static_cast<std::size_t>(k));
    for (Index x0 = 0; x0 < n; ++x0) {
        for (Index a0 = 0; a0 < na; ++a0) {
            std::fill(total.begin(), total.end(), 0.0);
            for (std::size_t r = 0; r < rollouts; ++r) {
                Index x = x0, a = a0;
                double g = 1.0;
                for (std::size_t t = 0; t < horizon; ++t) {
                    for (Index j = 0; j < k; ++j) total[static_cast<std::size_t>(j)] += g * phi(x * na + a, j);
                    g *= gamma;
                    x = sampler.next(x, a, u(gen));
                    a = sampler.action(x, u(gen));
                }
            }
            for (Index j = 0; j < k; ++j)
                out(x0 * na + a0, j) = total[static_cast<std::size_t>(j)] / static_cast<double>(rollouts);
        }
    }
    return out;
}

Vector monte_carlo_value(const TabularMdp& mdp, const Matrix& reward, const Matrix& policy,
                         std::size_t rollouts, std::size_t horizon, std::uint64_t seed) {
    const Sampler sampler(mdp, policy);
    const double gamma = mdp.discount();
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector out(mdp.n_states());
    for (Index x0 = 0; x0 < mdp.n_states(); ++x0) {
        double total = 0.0;
        for (std::size_t r = 0; r < rollouts; ++r) {
            Index x = x0;
            double g = 1.0;
            for (std::size_t t = 0; t < horizon; ++t) {
                const Index a = sampler.action(x, u(gen));
                total += g * reward(x, a);
                g *= gamma;
                x = sampler.next(x, a, u(gen));
            }
        }
        out(x0) = total / static_cast<double>(rollouts);
    }
    return out;
}

std::size_t truncation_horizon(double discount, double scale, double bound) {
    std::size_t h = 0;
    double g = scale;
    while (g >= bound) {
        g *= discount;
        ++h;
    }
    return h;
}

namespace {

Matrix reward_of(const FeatureMap& features, const Vector& theta) {
    return (features.values() * theta).reshaped<Eigen::RowMajor>(features.n_states(), features.n_actions());
}

// Counts of each (x,a) pair and of each x.
struct Counts {
    Matrix pairs;
    Vector states;
    double m = 0.0;
};

Counts count_pairs(const Demonstration& demo, Index n, Index na) {
    Counts c{Matrix::Zero(n, na), Vector::Zero(n), static_cast<double>(demo.m())};
    for (const auto& [x, a] : demo.pairs) {
        c.pairs(x, a) += 1.0;
        c.states(x) += 1.0;
    }
    return c;
}

} // namespace

Matrix exact_boltzmann(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                       double temperature) {
    return softmax_rows(exact_optimal_q(mdp, reward_of(features, theta)), temperature);
}

std::vector<Index> exact_greedy(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta) {
    return argmax_rows(exact_optimal_q(mdp, reward_of(features, theta)));
}

double exact_loglik(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                    double temperature, const Demonstration& demo) {
    const Matrix pi = exact_boltzmann(mdp, features, theta, temperature);
    double total = 0.0;
    for (const auto& [x, a] : demo.pairs) total += std::log(pi(x, a));
    return total;
}

double exact_similarity(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                        double temperature, const Demonstration& demo) {
    const Matrix pi = exact_boltzmann(mdp, features, theta, temperature);
    const Counts c = count_pairs(demo, mdp.n_states(), mdp.n_actions());
    double j = 0.0;
    for (Index x = 0; x < pi.rows(); ++x) {
        if (c.states(x) == 0.0) continue;
        for (Index a = 0; a < pi.cols(); ++a) {
            j += (c.states(x) / c.m) * (c.pairs(x, a) / c.states(x)) * std::log(pi(x, a));
        }
    }
    return j;
}

double exact_pm_cost(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                     double temperature, const Demonstration& demo) {
    const Matrix pi = exact_boltzmann(mdp, features, theta, temperature);
    const Counts c = count_pairs(demo, mdp.n_states(), mdp.n_actions());
    double cost = 0.0;
    for (Index x = 0; x < pi.rows(); ++x) {
        if (c.states(x) == 0.0) continue;
        for (Index a = 0; a < pi.cols(); ++a) {
            const double d = c.pairs(x, a) / c.states(x) - pi(x, a);
            cost += (c.states(x) / c.m) * d * d;
        }
    }
    return cost;
}

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& theta, double h) {
    Vector g(theta.size());
    for (Index k = 0; k < theta.size(); ++k) {
        Vector up = theta, down = theta;
        up(k) += h;
        down(k) -= h;
        g(k) = (f(up) - f(down)) / (2.0 * h);
    }
    return g;
}

bool greedy_locally_constant(const TabularMdp& mdp, const FeatureMap& features, const Vector& theta,
                             double h) {
    const auto base = exact_greedy(mdp, features, theta);
    for (Index k = 0; k < theta.size(); ++k) {
        for (double s : {-h, h}) {
            Vector t = theta;
            t(k) += s;
            if (exact_greedy(mdp, features, t) != base) return false;
        }
    }
    return true;
}

Vector brute_force_simplex_projection(const Vector& v, double resolution) {
    if (v.size() != 3) throw std::invalid_argument("brute_force_simplex_projection: 3-vector expected");
    const long steps = std::lround(1.0 / resolution);
    Vector best(3);
    double best_d = std::numeric_limits<double>::infinity();
    for (long i = 0; i <= steps; ++i) {
        for (long j = 0; i + j <= steps; ++j) {
            const Vector p{{static_cast<double>(i) / steps, static_cast<double>(j) / steps,
                            static_cast<double>(steps - i - j) / steps}};
            const double d = (p - v).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = p;
            }
        }
    }
    return best;
}

double relative_error(const Vector& a, const Vector& b, double floor) {
    return (a - b).norm() / std::max(b.norm(), floor);
}

} // namespace mlirl::oracle
