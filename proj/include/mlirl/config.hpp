#pragma once

#include "mlirl/experiment.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace mlirl {

/// Flat `key = value` text, one pair per line, `#` starts a comment. Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/**
 * Applies recognised keys on top of `base`. Throws ConfigError on unknown keys or bad values.
 *
 * Keys: env, algo, estimator, iters, seed, out, scale, temperature, step_size,
 * n_traj, horizon, expert, expert_temperature, repeats, constraint,
 * backtracking, timing, fp_tol, fp1_seed.
 */
ExperimentConfig apply_key_values(const std::map<std::string, std::string>& values,
                                  ExperimentConfig base);

/// Reads a config file; `env` and `scale` select defaults before the other keys apply.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& values);

} // namespace mlirl
