#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <poweruct/power_mean.hpp>

namespace poweruct {

enum class EnvId { frozen_lake, copy, rock_sample, pocman };
enum class Algo { uct, power_uct, max_uct, ments, pomcp, power_pomcp };

std::string to_string(EnvId env);
std::string to_string(Algo algo);
EnvId parse_env(const std::string& name);
Algo parse_algo(const std::string& name);

/// Declarative description of one experiment. Sentinel values (negative
/// gamma/C, zero step limit or belief capacity) resolve to per-environment
/// defaults at run time.
struct ExperimentConfig {
    EnvId env = EnvId::frozen_lake;
    Algo algo = Algo::uct;
    PowerOrder p = PowerOrder::finite(1.0);
    double exploration_c = -1.0;  // < 0: per-environment default
    double gamma = -1.0;          // < 0: per-environment default
    double rollout_eps = 0.01;
    std::int64_t simulations = 1000;
    int runs = 100;
    std::uint64_t base_seed = 1;
    bool plan_once = false;
    int workers = 0;  // 0: hardware concurrency
    std::string out;  // empty: stdout
    std::string format = "csv";
    // Wall-clock measurement is opt-in because a measured seconds column
    // would break byte-identical reruns.
    bool timing = false;
    bool reuse_tree = true;
    std::int64_t belief_capacity = 0;  // 0: simulations per move
    int step_limit = 0;                // 0: per-environment default
    double ments_tau = 0.1;
    double ments_eps = 1.0;
    bool heuristic_rollouts = false;  // model rollout policy instead of uniform

    // environment parameters
    int copy_alphabet = 36;
    int copy_tape = 40;
    int rock_n = 11;
    int rock_k = 11;
    std::string map_file;  // optional grid-file override (frozen_lake, pocman)

    /// Resolved copies of the sentinel fields.
    double resolved_gamma() const;
    double resolved_exploration_c() const;
    int resolved_step_limit() const;
};

struct ResultRow {
    std::string env;
    std::string algo;
    std::string p;  // "max" or the numeric order
    double exploration_c = 0.0;
    double gamma = 0.0;
    std::int64_t simulations = 0;
    int runs = 0;
    double mean = 0.0;
    double std_dev = 0.0;
    double std_error = 0.0;
    double seconds = 0.0;
};

/// Runs `runs` independent episodes (seeds base_seed + i) across a worker
/// pool and aggregates the per-episode returns in raw reward scale. Results
/// are bit-identical for any worker count.
ResultRow run_experiment(const ExperimentConfig& config);

/// Per-episode returns in episode order; run_experiment aggregates these.
std::vector<double> run_episode_returns(const ExperimentConfig& config);

struct GridResult {
    std::vector<ResultRow> rows;   // every evaluated cell, in grid order
    std::size_t best_index = 0;    // argmax mean
    std::vector<std::pair<std::string, std::string>> best_assignment;
};

/// Evaluates the Cartesian product of the axes (parameter name -> values,
/// applied through the config-file option names). With `increase_p` the
/// single axis must be "p" in increasing order; evaluation stops after the
/// mean first decreases.
GridResult grid_search(const ExperimentConfig& base,
                       const std::vector<std::pair<std::string, std::vector<std::string>>>& axes,
                       bool increase_p = false);

/// CSV columns: env,algo,p,C,gamma,sims,runs,mean,std_dev,std_error,seconds.
/// JSON emits the same records as an array. Byte-stable for identical rows.
void emit_results(std::span<const ResultRow> rows, const std::string& format,
                  std::ostream& out);

/// Writes to config.out (or stdout when empty) in config.format.
void emit_results_to(std::span<const ResultRow> rows, const ExperimentConfig& config);

/// key=value option application shared by the CLI and config files. Throws
/// std::invalid_argument for unknown keys or malformed values.
void apply_option(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Parses a key=value file ('#' comments, blank lines allowed) into options.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);

std::string format_power_order(PowerOrder p);
PowerOrder parse_power_order(const std::string& text);

}  // namespace poweruct
