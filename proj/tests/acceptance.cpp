// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// `acceptance 4 6` runs only the listed criteria.

#include "mlirl/csv.hpp"
#include "mlirl/experiment.hpp"
#include "mlirl/mdp.hpp"
#include "mlirl/metrics.hpp"
#include "oracles.hpp"
#include "suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace mlirl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Series {
    SummaryRow summary;
    double value_expert = 0.0;
    double mean_iter_ms = 0.0;
};

Series run_series(const std::string& env, Algorithm algo, Estimator est) {
    ExperimentConfig cfg = default_experiment(env);
    cfg.irl.algorithm = algo;
    cfg.irl.estimator.kind = est;
    const ExperimentResult r = run_experiment(cfg);
    Series s{r.summary.front(), r.value_expert, 0.0};
    double total = 0.0;
    for (const auto& row : r.rows) total += row.iter_wall_ms;
    if (!r.rows.empty()) s.mean_iter_ms = total / static_cast<double>(r.rows.size());
    std::fprintf(stderr, "  %s %s-%s: mean value %s (expert %s), agreement %s, %s ms/iter, %zu failures\n",
                 env.c_str(), std::string(to_string(algo)).c_str(), std::string(to_string(est)).c_str(),
                 fmt(s.summary.mean_value_true, 6).c_str(), fmt(r.value_expert, 6).c_str(),
                 fmt(s.summary.mean_agreement).c_str(), fmt(s.mean_iter_ms).c_str(), s.summary.failures);
    return s;
}

double ratio(const Series& s) { return s.summary.mean_value_true / s.value_expert; }

bool complete(const Series& s) { return s.summary.failures == 0 && s.summary.n_repeats == 10; }

Outcome oracle_criterion(oracle::CheckResult (*check)(), double limit_s) {
    const auto start = Clock::now();
    const oracle::CheckResult r = check();
    const double t = seconds_since(start);
    const bool in_time = limit_s <= 0.0 || t < limit_s;
    return {r.passed && in_time, r.detail + ", " + fmt(t, 3) + " s"};
}

Outcome criterion_narrow_passage() {
    const auto start = Clock::now();
    const Series girl = run_series("narrow-passage-2x2", Algorithm::GIRL, Estimator::FP);
    const Series pm = run_series("narrow-passage-2x2", Algorithm::PM, Estimator::FP);
    const Series mwal = run_series("narrow-passage-2x2", Algorithm::MWAL, Estimator::FP);
    const double t = seconds_since(start);
    const bool ok = complete(girl) && complete(pm) && complete(mwal) && ratio(girl) >= 0.95 &&
                    girl.summary.mean_agreement >= 0.85 && ratio(pm) >= 0.90 && ratio(mwal) >= 0.90 && t < 600.0;
    return {ok, "GIRL ratio " + fmt(ratio(girl)) + " agreement " + fmt(girl.summary.mean_agreement) + ", PM ratio " +
                    fmt(ratio(pm)) + ", MWAL ratio " + fmt(ratio(mwal)) + ", " + fmt(t, 3) + " s"};
}

Outcome criterion_paths() {
    const auto start = Clock::now();
    const Series fp = run_series("paths-10x10", Algorithm::GIRL, Estimator::FP);
    const Series ia = run_series("paths-10x10", Algorithm::GIRL, Estimator::IA);
    const double t = seconds_since(start);
    const bool ok = complete(fp) && complete(ia) && ratio(fp) >= 0.90 && ratio(ia) >= 0.90 && t < 900.0;
    return {ok, "GIRL-FP ratio " + fmt(ratio(fp)) + ", GIRL-IA ratio " + fmt(ratio(ia)) + ", " + fmt(t, 3) + " s"};
}

// Sailing runs are shared by criteria 6 and 7.
std::map<std::string, Series> sailing_cache;

const Series& sailing(Algorithm algo, Estimator est) {
    const std::string key = std::string(to_string(algo)) + "-" + std::string(to_string(est));
    auto it = sailing_cache.find(key);
    if (it == sailing_cache.end()) it = sailing_cache.emplace(key, run_series("sailing-small", algo, est)).first;
    return it->second;
}

Outcome criterion_sailing_girl() {
    const auto start = Clock::now();
    std::string detail;
    bool ok = true;
    std::map<Estimator, double> per_iter;
    for (auto est : {Estimator::FP, Estimator::IA, Estimator::FP1}) {
        const Series& s = sailing(Algorithm::GIRL, est);
        const double regret = std::abs(s.summary.mean_value_true - s.value_expert) / std::abs(s.value_expert);
        ok = ok && complete(s) && regret <= 0.05;
        per_iter[est] = s.mean_iter_ms;
        detail += std::string(to_string(est)) + " regret " + fmt(regret) + ", ";
    }
    const bool ordered = per_iter[Estimator::FP] > per_iter[Estimator::IA] &&
                         per_iter[Estimator::IA] > per_iter[Estimator::FP1];
    const double t = seconds_since(start);
    ok = ok && ordered && t < 1200.0;
    detail += "ms/iter FP " + fmt(per_iter[Estimator::FP]) + " > IA " + fmt(per_iter[Estimator::IA]) + " > FP1 " +
              fmt(per_iter[Estimator::FP1]) + (ordered ? "" : " (order violated)") + ", " + fmt(t, 3) + " s";
    return {ok, detail};
}

Outcome criterion_sailing_ordering() {
    const Series& girl = sailing(Algorithm::GIRL, Estimator::FP);
    const Series& pm = sailing(Algorithm::PM, Estimator::FP);
    const Series& mwal = sailing(Algorithm::MWAL, Estimator::FP);
    const bool ok = complete(girl) && complete(pm) && complete(mwal) &&
                    girl.summary.mean_value_true >= pm.summary.mean_value_true &&
                    pm.summary.mean_value_true >= mwal.summary.mean_value_true;
    return {ok, "GIRL " + fmt(girl.summary.mean_value_true, 6) + ", PM " + fmt(pm.summary.mean_value_true, 6) +
                    ", MWAL " + fmt(mwal.summary.mean_value_true, 6)};
}

std::string read_all(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome criterion_properties() {
    const auto start = Clock::now();
    std::vector<std::string> failed;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) failed.push_back(what);
    };

    // Boltzmann limits.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TabularMdp mdp = oracle::random_mdp(6, 4, 0.9, seed);
        const Matrix r = oracle::random_features(6, 4, 1, seed).values().reshaped<Eigen::RowMajor>(6, 4);
        const QFunction q = optimal_q(mdp, RewardTable{r});
        const StochasticPolicy hot = boltzmann_policy(q, BoltzmannConfig{1e6});
        expect((hot.probs().array() - 0.25).abs().maxCoeff() <= 1e-6, "high-temperature uniform");
        const auto greedy = greedy_policy(q).actions();
        for (Index x = 0; x < 6; ++x) {
            const Eigen::RowVectorXd row = q.values.row(x);
            const double spread = row.maxCoeff() - row.minCoeff();
            const StochasticPolicy cold = boltzmann_policy(QFunction{Matrix(row)}, BoltzmannConfig{1e-8 * spread});
            expect(cold(0, greedy[static_cast<std::size_t>(x)]) >= 1.0 - 1e-6, "low-temperature greedy");
        }
    }

    // Constant reward evaluates to c / (1 - gamma) under any policy.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TabularMdp mdp = oracle::random_mdp(7, 3, 0.95, seed);
        const double c = -2.0 + 0.5 * static_cast<double>(seed);
        const Matrix pi = oracle::softmax_rows(oracle::random_features(7, 3, 1, seed).values().reshaped<Eigen::RowMajor>(7, 3), 0.3);
        const ValueFunction v = policy_evaluation(mdp, RewardTable{Matrix::Constant(7, 3, c)}, StochasticPolicy(pi));
        expect((v.values.array() - c / 0.05).abs().maxCoeff() <= 1e-10, "constant-reward closed form");
    }

    // Simplex projection against brute force on 3-dim cases.
    std::mt19937_64 gen(99);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        Vector v(3);
        for (Index i = 0; i < 3; ++i) v(i) = n(gen);
        const Vector p = project_weights(v, ConstraintMode::NonnegSimplex).theta();
        expect((p - oracle::brute_force_simplex_projection(v, 1e-3)).cwiseAbs().maxCoeff() <= 1e-3,
               "simplex brute force");
    }

    // CSV round trip of random doubles.
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int trial = 0; trial < 5000; ++trial) {
        const std::uint64_t b = bits(gen);
        double v;
        std::memcpy(&v, &b, sizeof v);
        if (std::isfinite(v)) expect(parse_double(format_double(v)) == v, "csv round trip");
    }

    // Identical seeds give byte-identical output files.
    ExperimentConfig cfg = default_experiment("narrow-passage-2x2");
    cfg.irl.n_iterations = 5;
    cfg.n_repeats = 2;
    cfg.record_timing = false;
    const auto root = std::filesystem::temp_directory_path() / "mlirl_acceptance_determinism";
    std::filesystem::remove_all(root);
    for (const char* sub : {"a", "b"}) {
        const ExperimentResult r = run_experiment(cfg);
        emit_outputs(r.rows, r.summary, root / sub);
    }
    for (const char* file : {"iterations.csv", "summary.csv", "plot_value_true.csv", "plot_loglik.csv"}) {
        expect(read_all(root / "a" / file) == read_all(root / "b" / file), "byte-identical outputs");
    }
    std::filesystem::remove_all(root);

    const double t = seconds_since(start);
    std::set<std::string> unique(failed.begin(), failed.end());
    std::string detail = unique.empty() ? "all properties hold" : "failed:";
    for (const auto& f : unique) detail += " " + f + ";";
    return {unique.empty() && t < 60.0, detail + ", " + fmt(t, 3) + " s"};
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "gradient oracle (FP log L gradient vs finite differences)",
         [] { return oracle_criterion(oracle::gradient_oracle_check, 30.0); }},
        {2, "FP and IA agree under the greedy policy", [] { return oracle_criterion(oracle::fp_ia_identity_check, 0.0); }},
        {3, "FP against Monte-Carlo feature sums", [] { return oracle_criterion(oracle::fp_monte_carlo_check, 60.0); }},
        {4, "narrow passage value ratio and agreement", criterion_narrow_passage},
        {5, "path following value ratio", criterion_paths},
        {6, "sailing GIRL regret and estimator timing order", criterion_sailing_girl},
        {7, "sailing GIRL >= PM >= MWAL under FP", criterion_sailing_ordering},
        {8, "property suite", criterion_properties},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += !o.passed;
        std::printf("ACCEPTANCE %d %s: %s (%s)\n", c.id, o.passed ? "PASS" : "FAIL", c.title, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
