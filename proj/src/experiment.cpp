#include "mlirl/experiment.hpp"

#include "mlirl/csv.hpp"
#include "mlirl/demonstrations.hpp"
#include "mlirl/errors.hpp"
#include "mlirl/metrics.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace mlirl {

Scale parse_scale(std::string_view name) {
    if (name == "desk") return Scale::Desk;
    if (name == "paper") return Scale::Paper;
    throw ConfigError("unknown scale '" + std::string(name) + "' (expected desk or paper)");
}

namespace {

bool is_sailing(const std::string& environment) { return environment.rfind("sailing", 0) == 0; }

} // namespace

void apply_scale(ExperimentConfig& cfg, Scale scale) {
    if (!is_sailing(cfg.environment)) return;
    cfg.environment = scale == Scale::Desk ? "sailing-small" : "sailing-paper";
    cfg.n_traj = scale == Scale::Desk ? 512 : 5120;
}

ExperimentConfig default_experiment(const std::string& environment, Scale scale) {
    find_environment(environment);
    ExperimentConfig cfg;
    cfg.environment = environment;
    // Learned weights sit on the unit L1 sphere, so Q gaps are small in every environment.
    cfg.irl.temperature = 0.001;
    cfg.expert_temperature = 0.001;
    if (is_sailing(environment)) {
        apply_scale(cfg, scale);
    } else {
        cfg.n_traj = 200;
    }
    return cfg;
}

namespace {

struct VectorHash {
    std::size_t operator()(const std::vector<Index>& v) const noexcept {
        std::size_t h = v.size();
        for (Index a : v) h = h * 31 + static_cast<std::size_t>(a);
        return h;
    }
};

double sample_sd(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

struct SeriesKey {
    std::string algorithm;
    std::string estimator;
    auto operator<=>(const SeriesKey&) const = default;
};

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.n_repeats < 1) throw ConfigError("run_experiment: n_repeats must be at least 1");
    const EnvironmentBundle bundle = build_environment(cfg.environment);
    const ExpertSolution expert = solve_expert(bundle);
    const StochasticPolicy demo_policy =
        cfg.expert_mode == ExpertMode::Greedy
            ? expert.greedy
            : boltzmann_policy(expert.q, BoltzmannConfig{cfg.expert_temperature});
    const std::size_t horizon = cfg.horizon > 0 ? cfg.horizon : default_horizon(bundle.mdp.discount());
    const IrlProblem problem{bundle.mdp, bundle.features, bundle.costs_only};

    const std::string algorithm(to_string(cfg.irl.algorithm));
    const std::string estimator(to_string(cfg.irl.estimator.kind));

    ExperimentResult result;
    result.value_expert = expert.value;
    SummaryRow summary;
    summary.algorithm = algorithm;
    summary.estimator = estimator;
    std::vector<double> values, agreements, totals;

    std::unordered_map<std::vector<Index>, LearnedEvaluation, VectorHash> cache;
    for (std::size_t rep = 0; rep < cfg.n_repeats; ++rep) {
        const std::uint64_t seed = cfg.base_seed + rep;
        try {
            const Demonstration demo =
                sample_trajectories(bundle.mdp, demo_policy, cfg.n_traj, horizon, seed);
            const EmpiricalStats stats =
                empirical_policy(demo, bundle.mdp.n_states(), bundle.mdp.n_actions());
            IrlConfig irl = cfg.irl;
            irl.seed = seed;
            const IrlResult run = run_irl(problem, stats, demo, irl);

            double total_ms = 0.0;
            std::vector<MetricsRow> rows;
            for (std::size_t it = 0; it < run.trace.size(); ++it) {
                const auto& rec = run.trace[it];
                auto found = cache.find(rec.greedy_actions);
                if (found == cache.end()) {
                    const auto policy = StochasticPolicy::deterministic(rec.greedy_actions, bundle.mdp.n_actions());
                    found = cache.emplace(rec.greedy_actions, evaluate_learned(bundle, expert, policy)).first;
                }
                MetricsRow row;
                row.run_id = rep;
                row.algorithm = algorithm;
                row.estimator = estimator;
                row.iteration = it;
                row.loglik = rec.loglik;
                row.similarity_J = rec.similarity;
                row.value_true = found->second.value_true;
                row.value_expert = expert.value;
                row.policy_agreement = found->second.policy_agreement;
                row.iter_wall_ms = cfg.record_timing ? rec.wall_ms : 0.0;
                total_ms += row.iter_wall_ms;
                rows.push_back(std::move(row));
            }
            values.push_back(rows.back().value_true);
            agreements.push_back(rows.back().policy_agreement);
            totals.push_back(total_ms / 1000.0);
            result.rows.insert(result.rows.end(), rows.begin(), rows.end());
        } catch (const ConvergenceError& e) {
            ++summary.failures;
            ++summary.nonconvergent;
            summary.failure_notes.push_back("repeat " + std::to_string(rep) + ": " + e.what());
        } catch (const Error& e) {
            ++summary.failures;
            summary.failure_notes.push_back("repeat " + std::to_string(rep) + ": " + e.what());
        }
    }
    summary.n_repeats = values.size();
    summary.mean_value_true = mean_of(values);
    summary.sd_value_true = sample_sd(values, summary.mean_value_true);
    summary.mean_agreement = mean_of(agreements);
    summary.sd_agreement = sample_sd(agreements, summary.mean_agreement);
    summary.mean_total_s = mean_of(totals);
    result.summary.push_back(std::move(summary));
    return result;
}

ExperimentResult run_experiments(const std::vector<ExperimentConfig>& configs) {
    ExperimentResult all;
    for (const auto& cfg : configs) {
        ExperimentResult one = run_experiment(cfg);
        all.value_expert = one.value_expert;
        all.rows.insert(all.rows.end(), one.rows.begin(), one.rows.end());
        all.summary.insert(all.summary.end(), one.summary.begin(), one.summary.end());
    }
    return all;
}

std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows) {
    // Final row per (series, run): the row with the highest iteration index.
    std::vector<SeriesKey> order;
    std::map<SeriesKey, std::map<std::size_t, const MetricsRow*>> finals;
    std::map<SeriesKey, std::map<std::size_t, double>> totals;
    for (const auto& r : rows) {
        const SeriesKey key{r.algorithm, r.estimator};
        if (!finals.count(key)) order.push_back(key);
        auto& slot = finals[key][r.run_id];
        if (!slot || r.iteration > slot->iteration) slot = &r;
        totals[key][r.run_id] += r.iter_wall_ms;
    }
    std::vector<SummaryRow> out;
    for (const auto& key : order) {
        std::vector<double> values, agreements, secs;
        for (const auto& [run, row] : finals[key]) {
            values.push_back(row->value_true);
            agreements.push_back(row->policy_agreement);
            secs.push_back(totals[key][run] / 1000.0);
        }
        SummaryRow s;
        s.algorithm = key.algorithm;
        s.estimator = key.estimator;
        s.n_repeats = values.size();
        s.mean_value_true = mean_of(values);
        s.sd_value_true = sample_sd(values, s.mean_value_true);
        s.mean_agreement = mean_of(agreements);
        s.sd_agreement = sample_sd(agreements, s.mean_agreement);
        s.mean_total_s = mean_of(secs);
        out.push_back(std::move(s));
    }
    return out;
}

void write_iterations_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
    out << kIterationHeader << "\n";
    for (const auto& r : rows) {
        out << r.run_id << ',' << r.algorithm << ',' << r.estimator << ',' << r.iteration << ','
            << format_double(r.loglik) << ',' << format_double(r.similarity_J) << ','
            << format_double(r.value_true) << ',' << format_double(r.value_expert) << ','
            << format_double(r.policy_agreement) << ',' << format_double(r.iter_wall_ms) << "\n";
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
    out << kSummaryHeader << "\n";
    for (const auto& s : summary) {
        out << s.algorithm << ',' << s.estimator << ',' << format_double(s.mean_value_true) << ','
            << format_double(s.sd_value_true) << ',' << format_double(s.mean_agreement) << ','
            << format_double(s.sd_agreement) << ',' << format_double(s.mean_total_s) << ','
            << s.n_repeats << ',' << s.failures << "\n";
    }
}

std::vector<MetricsRow> read_iterations_csv(std::istream& in) {
    const CsvTable t = read_csv(in);
    const auto c_run = t.column("run_id"), c_alg = t.column("algorithm"), c_est = t.column("estimator"),
               c_it = t.column("iteration"), c_ll = t.column("loglik"), c_j = t.column("similarity_J"),
               c_v = t.column("value_true"), c_ve = t.column("value_expert"),
               c_ag = t.column("policy_agreement"), c_ms = t.column("iter_wall_ms");
    std::vector<MetricsRow> rows;
    rows.reserve(t.rows.size());
    for (const auto& f : t.rows) {
        MetricsRow r;
        r.run_id = static_cast<std::size_t>(parse_integer(f[c_run]));
        r.algorithm = f[c_alg];
        r.estimator = f[c_est];
        r.iteration = static_cast<std::size_t>(parse_integer(f[c_it]));
        r.loglik = parse_double(f[c_ll]);
        r.similarity_J = parse_double(f[c_j]);
        r.value_true = parse_double(f[c_v]);
        r.value_expert = parse_double(f[c_ve]);
        r.policy_agreement = parse_double(f[c_ag]);
        r.iter_wall_ms = parse_double(f[c_ms]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
    const CsvTable t = read_csv(in);
    std::vector<SummaryRow> out;
    for (const auto& f : t.rows) {
        SummaryRow s;
        s.algorithm = f[t.column("algorithm")];
        s.estimator = f[t.column("estimator")];
        s.mean_value_true = parse_double(f[t.column("mean_value_true")]);
        s.sd_value_true = parse_double(f[t.column("sd_value_true")]);
        s.mean_agreement = parse_double(f[t.column("mean_agreement")]);
        s.sd_agreement = parse_double(f[t.column("sd_agreement")]);
        s.mean_total_s = parse_double(f[t.column("mean_total_s")]);
        s.n_repeats = static_cast<std::size_t>(parse_integer(f[t.column("n_repeats")]));
        s.failures = static_cast<std::size_t>(parse_integer(f[t.column("failures")]));
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

double metric_value(const MetricsRow& r, const std::string& metric) {
    if (metric == "value_true") return r.value_true;
    if (metric == "policy_agreement") return r.policy_agreement;
    if (metric == "loglik") return r.loglik;
    if (metric == "similarity_J") return r.similarity_J;
    if (metric == "iter_wall_ms") return r.iter_wall_ms;
    throw ConfigError("unknown plot metric '" + metric + "'");
}

} // namespace

void write_plot_data(std::ostream& out, const std::vector<MetricsRow>& rows, const std::string& metric) {
    std::vector<std::string> order;
    std::map<std::string, std::map<std::size_t, std::vector<double>>> series;
    for (const auto& r : rows) {
        const std::string name = r.algorithm + "-" + r.estimator;
        if (!series.count(name)) order.push_back(name);
        series[name][r.iteration].push_back(metric_value(r, metric));
    }
    out << "series,iteration,mean,sd,n\n";
    for (const auto& name : order) {
        for (const auto& [iteration, xs] : series[name]) {
            const double m = mean_of(xs);
            out << name << ',' << iteration << ',' << format_double(m) << ','
                << format_double(sample_sd(xs, m)) << ',' << xs.size() << "\n";
        }
    }
}

namespace {

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    writer(out);
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace

void emit_outputs(const std::vector<MetricsRow>& rows, const std::vector<SummaryRow>& summary,
                  const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
    write_file(dir / "iterations.csv", [&](std::ostream& out) { write_iterations_csv(out, rows); });
    write_file(dir / "summary.csv", [&](std::ostream& out) { write_summary_csv(out, summary); });
    for (const char* metric : kPlotMetrics) {
        write_file(dir / (std::string("plot_") + metric + ".csv"),
                   [&](std::ostream& out) { write_plot_data(out, rows, metric); });
    }
}

} // namespace mlirl
