#include <doctest.h>

#include "mlirl/config.hpp"
#include "mlirl/csv.hpp"
#include "mlirl/errors.hpp"
#include "mlirl/experiment.hpp"
#include "mlirl/metrics.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

using namespace mlirl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mlirl_test_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig tiny(const std::string& env, Algorithm algo, Estimator est) {
    ExperimentConfig cfg = default_experiment(env);
    cfg.irl.algorithm = algo;
    cfg.irl.estimator.kind = est;
    cfg.irl.n_iterations = 3;
    cfg.n_repeats = 2;
    cfg.n_traj = 15;
    cfg.base_seed = 5;
    cfg.record_timing = false;
    return cfg;
}

} // namespace

TEST_CASE("decimal encoding round-trips every double") {
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<std::uint64_t> bits;
    int checked = 0;
    while (checked < 2000) {
        const std::uint64_t b = bits(gen);
        double v;
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v)) continue;
        CHECK(parse_double(format_double(v)) == v);
        ++checked;
    }
    for (double v : {0.0, -0.0, 1.0 / 3.0, 0.1, 1e-310, std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::denorm_min()}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK_THROWS_AS(parse_double("1.5x"), IoError);
    CHECK_THROWS_AS(parse_integer("12.5"), IoError);
}

TEST_CASE("csv splitting and tables") {
    CHECK(split_csv_line("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
    std::istringstream in("x,y\n1,2\n3,4\n");
    const CsvTable t = read_csv(in);
    CHECK(t.rows.size() == 2);
    CHECK(t.rows[1][t.column("y")] == "4");
    CHECK_THROWS_AS(t.column("z"), IoError);
    std::istringstream ragged("x,y\n1\n");
    CHECK_THROWS_AS(read_csv(ragged), IoError);
}

TEST_CASE("iteration rows round-trip losslessly") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> n(0.0, 1e3);
    std::vector<MetricsRow> rows;
    for (std::size_t i = 0; i < 50; ++i) {
        rows.push_back({i % 3, "GIRL", "FP1", i, n(gen), n(gen), n(gen), n(gen), std::abs(n(gen)) / 1e4, n(gen)});
    }
    std::stringstream buffer;
    write_iterations_csv(buffer, rows);
    const auto back = read_iterations_csv(buffer);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].run_id == rows[i].run_id);
        CHECK(back[i].loglik == rows[i].loglik);
        CHECK(back[i].similarity_J == rows[i].similarity_J);
        CHECK(back[i].value_true == rows[i].value_true);
        CHECK(back[i].value_expert == rows[i].value_expert);
        CHECK(back[i].policy_agreement == rows[i].policy_agreement);
        CHECK(back[i].iter_wall_ms == rows[i].iter_wall_ms);
    }
    std::stringstream sbuf;
    const auto summary = summarize(rows);
    write_summary_csv(sbuf, summary);
    const auto sback = read_summary_csv(sbuf);
    REQUIRE(sback.size() == 1);
    CHECK(sback[0].mean_value_true == summary[0].mean_value_true);
    CHECK(sback[0].sd_agreement == summary[0].sd_agreement);
}

TEST_CASE("policy agreement") {
    const std::vector<Index> a{0, 1, 2, 1}, b{0, 1, 2, 1}, c{1, 2, 0, 0};
    const auto pa = StochasticPolicy::deterministic(a, 3);
    CHECK(policy_agreement(pa, StochasticPolicy::deterministic(b, 3)) == 1.0);
    CHECK(policy_agreement(pa, StochasticPolicy::deterministic(c, 3)) == 0.0);
    // A tie in the expert's Q counts either tied action as a match.
    Matrix q = Matrix::Zero(4, 3);
    q(0, 0) = 1.0;
    q(1, 1) = 1.0;
    q(2, 2) = 1.0;
    q(3, 1) = q(3, 0) = 1.0;
    const std::vector<Index> d{0, 1, 2, 0};
    CHECK(policy_agreement(pa, StochasticPolicy::deterministic(d, 3)) == 0.75);
    CHECK(policy_agreement(pa, StochasticPolicy::deterministic(d, 3), QFunction{q}) == 1.0);
    CHECK_THROWS_AS(policy_agreement(pa, StochasticPolicy::uniform(4, 3)), ConfigError);
    CHECK_THROWS_AS(policy_agreement(pa, StochasticPolicy::deterministic(a, 4)), DimensionError);
}

TEST_CASE("learned policy evaluation") {
    const EnvironmentBundle env = build_environment("narrow-passage-2x2");
    const ExpertSolution expert = solve_expert(env);
    const LearnedEvaluation self = evaluate_learned(env, expert, expert.greedy);
    CHECK(self.value_true == doctest::Approx(expert.value).epsilon(1e-12));
    CHECK(self.policy_agreement == 1.0);

    std::mt19937_64 gen(3);
    std::uniform_int_distribution<Index> act(0, 4);
    std::vector<Index> random(100);
    for (auto& x : random) x = act(gen);
    const LearnedEvaluation worse = evaluate_learned(env, expert, StochasticPolicy::deterministic(random, 5));
    CHECK(worse.value_true < expert.value);
}

TEST_CASE("config parsing") {
    std::istringstream in("# comment\nenv = sailing-small  # trailing\n\nalgo=PM\niters = 7\nbacktracking = yes\n");
    const auto kv = parse_key_values(in);
    CHECK(kv.size() == 4);
    const ExperimentConfig cfg = config_from_key_values(kv);
    CHECK(cfg.environment == "sailing-small");
    CHECK(cfg.irl.algorithm == Algorithm::PM);
    CHECK(cfg.irl.n_iterations == 7);
    CHECK(cfg.irl.backtracking);
    CHECK(cfg.irl.temperature == 0.001);
    CHECK(cfg.n_traj == 512);

    const auto paper = config_from_key_values({{"env", "sailing-small"}, {"scale", "paper"}});
    CHECK(paper.environment == "sailing-paper");
    CHECK(paper.n_traj == 5120);
    const auto grid = config_from_key_values({{"env", "paths-10x10"}, {"scale", "paper"}});
    CHECK(grid.environment == "paths-10x10");

    std::istringstream dup("iters = 1\niters = 2\n");
    CHECK_THROWS_AS(parse_key_values(dup), ConfigError);
    std::istringstream noeq("iters 1\n");
    CHECK_THROWS_AS(parse_key_values(noeq), ConfigError);
    CHECK_THROWS_AS(config_from_key_values({{"colour", "red"}}), ConfigError);
    CHECK_THROWS_AS(config_from_key_values({{"iters", "many"}}), ConfigError);
    CHECK_THROWS_AS(config_from_key_values({{"repeats", "0"}}), ConfigError);
    CHECK_THROWS_AS(config_from_key_values({{"env", "atlantis"}}), NotFoundError);
    CHECK_THROWS_AS(config_from_key_values({{"scale", "huge"}}), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/mlirl.cfg"), IoError);
}

TEST_CASE("one repeat of one iteration gives one row and one summary") {
    ExperimentConfig cfg = tiny("narrow-passage-2x2", Algorithm::GIRL, Estimator::IA);
    cfg.n_repeats = 1;
    cfg.irl.n_iterations = 1;
    const ExperimentResult r = run_experiment(cfg);
    CHECK(r.rows.size() == 1);
    CHECK(r.summary.size() == 1);
    CHECK(r.summary[0].n_repeats == 1);
    CHECK(r.summary[0].failures == 0);
}

TEST_CASE("rows respect expert optimality and summaries equal final-row means") {
    std::vector<ExperimentConfig> configs;
    for (auto algo : {Algorithm::GIRL, Algorithm::PM, Algorithm::MWAL})
        for (auto est : {Estimator::IA, Estimator::FP1}) configs.push_back(tiny("narrow-passage-2x2", algo, est));
    const ExperimentResult r = run_experiments(configs);
    CHECK(r.rows.size() == 6 * 2 * 3);
    for (const auto& row : r.rows) {
        CHECK(row.value_true <= row.value_expert + 1e-9);
        CHECK(row.policy_agreement >= 0.0);
        CHECK(row.policy_agreement <= 1.0);
        CHECK(row.iter_wall_ms == 0.0);
    }
    const auto recomputed = summarize(r.rows);
    REQUIRE(recomputed.size() == r.summary.size());
    for (std::size_t i = 0; i < recomputed.size(); ++i) {
        CHECK(recomputed[i].mean_value_true == r.summary[i].mean_value_true);
        CHECK(recomputed[i].mean_agreement == r.summary[i].mean_agreement);
        double sum = 0.0;
        int n = 0;
        for (const auto& row : r.rows) {
            if (row.algorithm == recomputed[i].algorithm && row.estimator == recomputed[i].estimator &&
                row.iteration == 2) {
                sum += row.value_true;
                ++n;
            }
        }
        CHECK(recomputed[i].mean_value_true == sum / n);
    }

    const fs::path dir = scratch("series");
    emit_outputs(r.rows, r.summary, dir);
    std::ifstream plot(dir / "plot_value_true.csv");
    const CsvTable t = read_csv(plot);
    std::set<std::string> series;
    for (const auto& row : t.rows) series.insert(row[t.column("series")]);
    CHECK(series.size() == 6);

    std::ifstream iters(dir / "iterations.csv");
    const auto reread = summarize(read_iterations_csv(iters));
    std::ifstream summ(dir / "summary.csv");
    const auto emitted = read_summary_csv(summ);
    REQUIRE(reread.size() == emitted.size());
    for (std::size_t i = 0; i < emitted.size(); ++i) {
        CHECK(std::abs(reread[i].mean_value_true - emitted[i].mean_value_true) <= 1e-12);
        CHECK(std::abs(reread[i].sd_agreement - emitted[i].sd_agreement) <= 1e-12);
    }
    fs::remove_all(dir);
}

TEST_CASE("identical seeds give byte-identical files") {
    const ExperimentConfig cfg = tiny("sailing-small", Algorithm::GIRL, Estimator::FP1);
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    for (const auto& dir : {a, b}) {
        const ExperimentResult r = run_experiment(cfg);
        emit_outputs(r.rows, r.summary, dir);
    }
    for (const char* file : {"iterations.csv", "summary.csv", "plot_loglik.csv"}) {
        CHECK(slurp(a / file) == slurp(b / file));
        CHECK_FALSE(slurp(a / file).empty());
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("empty output is headers only") {
    const fs::path dir = scratch("empty");
    emit_outputs({}, {}, dir);
    CHECK(slurp(dir / "iterations.csv") == std::string(kIterationHeader) + "\n");
    CHECK(slurp(dir / "summary.csv") == std::string(kSummaryHeader) + "\n");
    CHECK(slurp(dir / "plot_similarity_J.csv") == "series,iteration,mean,sd,n\n");
    fs::remove_all(dir);
}

TEST_CASE("output failures name the path") {
    const fs::path blocker = scratch("blocker");
    std::ofstream(blocker) << "x";
    try {
        emit_outputs({}, {}, blocker / "sub");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("blocker") != std::string::npos);
    }
    fs::remove_all(blocker);
}

TEST_CASE("failing repeats are counted, not fatal") {
    ExperimentConfig cfg = tiny("sailing-small", Algorithm::GIRL, Estimator::FP);
    cfg.irl.estimator.fp_max_iter = 3;
    const ExperimentResult r = run_experiment(cfg);
    CHECK(r.rows.empty());
    CHECK(r.summary[0].failures == 2);
    CHECK(r.summary[0].nonconvergent == 2);
    CHECK(r.summary[0].failure_notes[0].find("iteration 0") != std::string::npos);
}
