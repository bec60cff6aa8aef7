#include "mlirl/config.hpp"

#include "mlirl/csv.hpp"
#include "mlirl/errors.hpp"

#include <fstream>
#include <istream>
#include <set>

namespace mlirl {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

double to_real(const std::string& key, const std::string& v) {
    try {
        return parse_double(v);
    } catch (const IoError&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

std::size_t to_count(const std::string& key, const std::string& v) {
    long long n = 0;
    try {
        n = parse_integer(v);
    } catch (const IoError&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
    if (n < 0) throw ConfigError("key '" + key + "': must be nonnegative");
    return static_cast<std::size_t>(n);
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

ExperimentConfig apply_key_values(const std::map<std::string, std::string>& values, ExperimentConfig cfg) {
    for (const auto& [key, v] : values) {
        if (key == "env") {
            find_environment(v);
            cfg.environment = v;
        } else if (key == "scale") {
            apply_scale(cfg, parse_scale(v));
        } else if (key == "algo") {
            cfg.irl.algorithm = parse_algorithm(v);
        } else if (key == "estimator") {
            cfg.irl.estimator.kind = parse_estimator(v);
        } else if (key == "iters") {
            cfg.irl.n_iterations = to_count(key, v);
            if (cfg.irl.n_iterations == 0) throw ConfigError("iters must be at least 1");
        } else if (key == "seed") {
            cfg.base_seed = to_count(key, v);
        } else if (key == "out") {
            cfg.output_dir = v;
        } else if (key == "temperature") {
            cfg.irl.temperature = to_real(key, v);
            if (!(cfg.irl.temperature > 0.0)) throw ConfigError("temperature must be positive");
        } else if (key == "step_size") {
            cfg.irl.step_size = to_real(key, v);
            if (!(cfg.irl.step_size > 0.0)) throw ConfigError("step_size must be positive");
        } else if (key == "n_traj") {
            cfg.n_traj = to_count(key, v);
        } else if (key == "horizon") {
            cfg.horizon = to_count(key, v);
        } else if (key == "expert") {
            if (v == "greedy") cfg.expert_mode = ExpertMode::Greedy;
            else if (v == "boltzmann") cfg.expert_mode = ExpertMode::Boltzmann;
            else throw ConfigError("expert must be greedy or boltzmann");
        } else if (key == "expert_temperature") {
            cfg.expert_temperature = to_real(key, v);
            if (!(cfg.expert_temperature > 0.0)) throw ConfigError("expert_temperature must be positive");
        } else if (key == "repeats") {
            cfg.n_repeats = to_count(key, v);
            if (cfg.n_repeats == 0) throw ConfigError("repeats must be at least 1");
        } else if (key == "constraint") {
            cfg.irl.constraint_mode = parse_constraint_mode(v);
        } else if (key == "backtracking") {
            cfg.irl.backtracking = parse_bool(key, v);
        } else if (key == "timing") {
            cfg.record_timing = parse_bool(key, v);
        } else if (key == "fp_tol") {
            cfg.irl.estimator.fp_tol = to_real(key, v);
            if (!(cfg.irl.estimator.fp_tol > 0.0)) throw ConfigError("fp_tol must be positive");
        } else if (key == "fp_max_iter") {
            cfg.irl.estimator.fp_max_iter = to_count(key, v);
            if (cfg.irl.estimator.fp_max_iter == 0) throw ConfigError("fp_max_iter must be at least 1");
        } else if (key == "fp1_seed") {
            if (v == "features") cfg.irl.estimator.fp1_seed_at_features = true;
            else if (v == "zero") cfg.irl.estimator.fp1_seed_at_features = false;
            else throw ConfigError("fp1_seed must be features or zero");
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& values) {
    const auto env = values.find("env");
    const auto scale = values.find("scale");
    ExperimentConfig base = default_experiment(env != values.end() ? env->second : "narrow-passage-2x2",
                                               scale != values.end() ? parse_scale(scale->second) : Scale::Desk);
    auto rest = values;
    rest.erase("env");
    rest.erase("scale");
    return apply_key_values(rest, base);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    return config_from_key_values(parse_key_values(in));
}

} // namespace mlirl
