#include "mlirl/config.hpp"
#include "mlirl/errors.hpp"
#include "mlirl/experiment.hpp"

#include "suite.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using KeyValues = std::map<std::string, std::string>;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

struct Overrides {
    std::optional<std::string> env, algo, estimator, out, scale;
    std::optional<std::size_t> iters, repeats;
    std::optional<std::uint64_t> seed;
    bool no_timing = false;

    void attach(CLI::App& app) {
        app.add_option("--env", env, "Environment name");
        app.add_option("--algo", algo, "GIRL, PM or MWAL");
        app.add_option("--estimator", estimator, "FP, IA or FP1");
        app.add_option("--iters", iters, "IRL iterations per run");
        app.add_option("--seed", seed, "Base seed; repeat i uses seed + i");
        app.add_option("--out", out, "Output directory");
        app.add_option("--scale", scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
        app.add_option("--repeats", repeats, "Independent runs per configuration");
        app.add_flag("--no-timing", no_timing, "Write zero wall times so outputs are byte-reproducible");
    }

    // Everything except env, algo and estimator, which the batch commands iterate over.
    void apply_common(KeyValues& kv) const {
        if (iters) kv["iters"] = std::to_string(*iters);
        if (seed) kv["seed"] = std::to_string(*seed);
        if (out) kv["out"] = *out;
        if (scale) kv["scale"] = *scale;
        if (repeats) kv["repeats"] = std::to_string(*repeats);
        if (no_timing) kv["timing"] = "false";
    }

    void apply_all(KeyValues& kv) const {
        apply_common(kv);
        if (env) kv["env"] = *env;
        if (algo) kv["algo"] = *algo;
        if (estimator) kv["estimator"] = *estimator;
    }
};

void print_summary(const std::vector<mlirl::SummaryRow>& summary, double value_expert) {
    std::printf("expert value %.6g\n", value_expert);
    std::printf("%-6s %-4s %14s %12s %10s %10s %9s\n", "algo", "est", "value_true", "sd", "agree", "sd", "T (s)");
    for (const auto& s : summary) {
        std::printf("%-6s %-4s %14.6g %12.4g %10.4f %10.4f %9.3f", s.algorithm.c_str(), s.estimator.c_str(),
                    s.mean_value_true, s.sd_value_true, s.mean_agreement, s.sd_agreement, s.mean_total_s);
        if (s.failures > 0) std::printf("  (%zu failed)", s.failures);
        std::printf("\n");
        for (const auto& note : s.failure_notes) std::fprintf(stderr, "  %s\n", note.c_str());
    }
}

int finish(const std::vector<mlirl::ExperimentConfig>& configs, const std::filesystem::path& dir) {
    const mlirl::ExperimentResult result = mlirl::run_experiments(configs);
    mlirl::emit_outputs(result.rows, result.summary, dir);
    print_summary(result.summary, result.value_expert);
    std::printf("wrote %s\n", dir.string().c_str());
    for (const auto& s : result.summary) {
        if (s.nonconvergent > 0) return kExitConvergence;
    }
    for (const auto& s : result.summary) {
        if (s.failures > 0) return kExitOther;
    }
    return kExitOk;
}

std::vector<std::string> selection(const std::optional<std::string>& only, std::vector<std::string> all) {
    if (only) return {*only};
    return all;
}

std::vector<mlirl::ExperimentConfig> grid_of(const KeyValues& base, const Overrides& o) {
    std::vector<mlirl::ExperimentConfig> configs;
    for (const auto& algo : selection(o.algo, {"GIRL", "PM", "MWAL"})) {
        for (const auto& est : selection(o.estimator, {"FP", "IA", "FP1"})) {
            KeyValues kv = base;
            kv["algo"] = algo;
            kv["estimator"] = est;
            configs.push_back(mlirl::config_from_key_values(kv));
        }
    }
    return configs;
}

int run_main(int argc, char** argv) {
    CLI::App app{"Tabular inverse reinforcement learning experiments"};
    app.require_subcommand(1);

    Overrides run_o, table_o, grid_o;
    std::string config_path;
    auto* run = app.add_subcommand("run", "Run one experiment described by a config file");
    run->add_option("config", config_path, "key = value config file")->required();
    run_o.attach(*run);

    auto* table = app.add_subcommand("table1", "Sailing: every algorithm with every estimator");
    table_o.attach(*table);

    auto* grids = app.add_subcommand("gridworlds", "Both grid-world layouts with every algorithm and estimator");
    grid_o.attach(*grids);

    auto* oracle = app.add_subcommand("oracle", "Run the reference-oracle check suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*run) {
        std::ifstream in(config_path);
        if (!in) throw mlirl::IoError("cannot open config '" + config_path + "'");
        KeyValues kv = mlirl::parse_key_values(in);
        run_o.apply_all(kv);
        const auto cfg = mlirl::config_from_key_values(kv);
        return finish({cfg}, cfg.output_dir);
    }
    if (*table) {
        KeyValues base{{"env", "sailing-small"}, {"out", "results/table1"}};
        table_o.apply_common(base);
        if (table_o.env) base["env"] = *table_o.env;
        const auto configs = grid_of(base, table_o);
        return finish(configs, configs.front().output_dir);
    }
    if (*grids) {
        int code = kExitOk;
        const std::string root = grid_o.out.value_or("results/gridworlds");
        for (const auto& env : selection(grid_o.env, {"narrow-passage-2x2", "paths-10x10"})) {
            KeyValues base{{"env", env}};
            grid_o.apply_common(base);
            base["out"] = root + "/" + env;
            std::printf("== %s\n", env.c_str());
            const auto configs = grid_of(base, grid_o);
            code = std::max(code, finish(configs, configs.front().output_dir));
        }
        return code;
    }
    if (*oracle) {
        const std::size_t failures = mlirl::oracle::run_suite(&std::cout);
        std::printf("%zu of %zu checks failed\n", failures, mlirl::oracle::all_checks().size());
        return failures == 0 ? kExitOk : kExitOther;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const mlirl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mlirl::ConvergenceError& e) {
        std::cerr << "did not converge: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const mlirl::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
}
