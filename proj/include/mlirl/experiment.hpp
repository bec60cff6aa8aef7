#pragma once

#include "mlirl/environments.hpp"
#include "mlirl/irl.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mlirl {

enum class ExpertMode { Greedy, Boltzmann };
enum class Scale { Desk, Paper };

Scale parse_scale(std::string_view name);

struct ExperimentConfig {
    std::string environment = "narrow-passage-2x2";
    IrlConfig irl{};
    std::size_t n_traj = 200;
    /// 0 selects default_horizon(discount).
    std::size_t horizon = 0;
    ExpertMode expert_mode = ExpertMode::Greedy;
    double expert_temperature = 0.1;
    std::size_t n_repeats = 10;
    std::uint64_t base_seed = 0;
    std::filesystem::path output_dir = "results";
    /// When false every wall-time field is written as 0, making outputs byte-reproducible.
    bool record_timing = true;
};

/// Per-environment defaults (temperature, demonstration size) at the given scale.
ExperimentConfig default_experiment(const std::string& environment, Scale scale = Scale::Desk);

/// Swaps the sailing variant and demonstration size for the requested scale.
void apply_scale(ExperimentConfig& cfg, Scale scale);

struct MetricsRow {
    std::size_t run_id = 0;
    std::string algorithm;
    std::string estimator;
    std::size_t iteration = 0;
    double loglik = 0.0;
    double similarity_J = 0.0;
    double value_true = 0.0;
    double value_expert = 0.0;
    double policy_agreement = 0.0;
    double iter_wall_ms = 0.0;
};

struct SummaryRow {
    std::string algorithm;
    std::string estimator;
    double mean_value_true = 0.0;
    double sd_value_true = 0.0;
    double mean_agreement = 0.0;
    double sd_agreement = 0.0;
    double mean_total_s = 0.0;
    std::size_t n_repeats = 0;
    std::size_t failures = 0;
    /// Not written to CSV: how many of the failures were solver non-convergence.
    std::size_t nonconvergent = 0;
    std::vector<std::string> failure_notes;
};

struct ExperimentResult {
    std::vector<MetricsRow> rows;
    std::vector<SummaryRow> summary;
    double value_expert = 0.0;
};

/**
 * Builds the environment, solves the expert once, then for repeat i uses seed
 * base_seed + i to sample a demonstration and run the configured algorithm.
 * A failing repeat is counted in the summary's `failures` and contributes no rows.
 */
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs several configurations in order and concatenates their rows and summaries.
ExperimentResult run_experiments(const std::vector<ExperimentConfig>& configs);

/// One summary row per (algorithm, estimator) in first-seen order, from final-iteration rows.
std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows);

inline constexpr const char* kIterationHeader =
    "run_id,algorithm,estimator,iteration,loglik,similarity_J,value_true,value_expert,policy_agreement,iter_wall_ms";
inline constexpr const char* kSummaryHeader =
    "algorithm,estimator,mean_value_true,sd_value_true,mean_agreement,sd_agreement,mean_total_s,n_repeats,failures";

void write_iterations_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);
std::vector<MetricsRow> read_iterations_csv(std::istream& in);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

/// Metrics with a plot-data file each.
inline constexpr std::array<const char*, 4> kPlotMetrics{"value_true", "policy_agreement", "loglik",
                                                         "similarity_J"};

/// Per-iteration mean and sample sd across runs, one series per algorithm-estimator pair.
void write_plot_data(std::ostream& out, const std::vector<MetricsRow>& rows, const std::string& metric);

/**
 * Writes iterations.csv, summary.csv and plot_<metric>.csv into `dir`
 * (created if missing). I/O failures raise IoError naming the path.
 */
void emit_outputs(const std::vector<MetricsRow>& rows, const std::vector<SummaryRow>& summary,
                  const std::filesystem::path& dir);

} // namespace mlirl
