#include <fstream>
#include <sstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <poweruct/harness.hpp>
#include <poweruct/theory_checks.hpp>

namespace {

using poweruct::ExperimentConfig;

struct CommonOpts {
    std::optional<std::string> config_file;
    std::optional<std::string> env, algo, p, out, format, map;
    std::optional<double> c, gamma, eps, ments_tau, ments_eps;
    std::optional<std::int64_t> sims, belief;
    std::optional<int> runs, workers, step_limit, alphabet, tape, rock_n, rock_k;
    std::optional<std::uint64_t> seed;
    bool plan_once = false;
    bool timing = false;
    bool no_reuse = false;
    bool heuristic_rollouts = false;
};

void add_common_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_file, "key=value config file; flags override it");
    cmd->add_option("--env", o.env, "frozenlake | copy | rocksample | pocman");
    cmd->add_option("--algo", o.algo,
                    "uct | power_uct | max_uct | ments | pomcp | power_pomcp");
    cmd->add_option("--p", o.p, "power mean order (>= 1) or 'max'");
    cmd->add_option("--c", o.c, "exploration constant");
    cmd->add_option("--gamma", o.gamma, "discount factor in (0, 1]");
    cmd->add_option("--eps", o.eps, "rollout cutoff epsilon");
    cmd->add_option("--sims", o.sims, "simulations per move");
    cmd->add_option("--runs", o.runs, "evaluation episodes");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_flag("--plan-once", o.plan_once, "plan once, then act greedily");
    cmd->add_option("--workers", o.workers, "worker threads (0 = hardware)");
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--format", o.format, "csv | json");
    cmd->add_flag("--timing", o.timing, "record wall-clock seconds (breaks byte reproducibility)");
    cmd->add_flag("--no-reuse", o.no_reuse, "discard the tree between moves");
    cmd->add_flag("--heuristic-rollouts", o.heuristic_rollouts,
                  "use the environment's rollout policy instead of uniform");
    cmd->add_option("--belief", o.belief, "belief particle capacity (0 = sims)");
    cmd->add_option("--step-limit", o.step_limit, "episode step limit (0 = env default)");
    cmd->add_option("--ments-tau", o.ments_tau, "MENTS temperature");
    cmd->add_option("--ments-eps", o.ments_eps, "MENTS exploration");
    cmd->add_option("--alphabet", o.alphabet, "copy alphabet size");
    cmd->add_option("--tape", o.tape, "copy tape length");
    cmd->add_option("--rock-n", o.rock_n, "rocksample grid size");
    cmd->add_option("--rock-k", o.rock_k, "rocksample rock count");
    cmd->add_option("--map", o.map, "grid layout file (frozenlake, pocman)");
}

ExperimentConfig build_config(const CommonOpts& o) {
    ExperimentConfig cfg;
    if (o.config_file)
        for (const auto& [key, value] : poweruct::parse_config_file(*o.config_file))
            poweruct::apply_option(cfg, key, value);
    auto set = [&cfg](const std::string& key, const auto& opt) {
        if (opt) {
            std::ostringstream text;
            text << *opt;
            poweruct::apply_option(cfg, key, text.str());
        }
    };
    if (o.env) poweruct::apply_option(cfg, "env", *o.env);
    if (o.algo) poweruct::apply_option(cfg, "algo", *o.algo);
    if (o.p) poweruct::apply_option(cfg, "p", *o.p);
    set("c", o.c);
    set("gamma", o.gamma);
    set("eps", o.eps);
    set("sims", o.sims);
    set("runs", o.runs);
    set("seed", o.seed);
    if (o.plan_once) cfg.plan_once = true;
    set("workers", o.workers);
    if (o.out) cfg.out = *o.out;
    if (o.format) cfg.format = *o.format;
    if (o.timing) cfg.timing = true;
    if (o.no_reuse) cfg.reuse_tree = false;
    if (o.heuristic_rollouts) cfg.heuristic_rollouts = true;
    set("belief_capacity", o.belief);
    set("step_limit", o.step_limit);
    set("ments_tau", o.ments_tau);
    set("ments_eps", o.ments_eps);
    set("alphabet", o.alphabet);
    set("tape", o.tape);
    set("rock_n", o.rock_n);
    set("rock_k", o.rock_k);
    if (o.map) cfg.map_file = *o.map;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Power-mean MCTS planners and benchmark harness"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment configuration");
    add_common_options(run_cmd, run_opts);

    CommonOpts grid_opts;
    std::vector<std::string> axes_raw;
    bool increase_p = false;
    CLI::App* grid_cmd = app.add_subcommand("grid", "grid search over parameter axes");
    add_common_options(grid_cmd, grid_opts);
    grid_cmd->add_option("--axis", axes_raw, "axis as key=v1,v2,... (repeatable)")->required();
    grid_cmd->add_flag("--increase-p", increase_p,
                       "single p axis, stop when performance decreases");

    std::uint64_t checks_seed = 20240901;
    std::string checks_out;
    CLI::App* checks_cmd = app.add_subcommand("checks", "run the statistical check suite");
    checks_cmd->add_option("--seed", checks_seed, "suite seed");
    checks_cmd->add_option("--out", checks_out, "JSON-lines output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const ExperimentConfig cfg = build_config(run_opts);
            const poweruct::ResultRow row = poweruct::run_experiment(cfg);
            const std::vector<poweruct::ResultRow> rows{row};
            poweruct::emit_results_to(rows, cfg);
        } else if (grid_cmd->parsed()) {
            const ExperimentConfig cfg = build_config(grid_opts);
            std::vector<std::pair<std::string, std::vector<std::string>>> axes;
            for (const auto& raw : axes_raw) {
                const auto eq = raw.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("axis must look like key=v1,v2,...: " + raw);
                std::vector<std::string> values;
                std::string rest = raw.substr(eq + 1);
                std::size_t pos = 0;
                while (pos <= rest.size()) {
                    const auto comma = rest.find(',', pos);
                    values.push_back(rest.substr(
                        pos, comma == std::string::npos ? std::string::npos : comma - pos));
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
                axes.emplace_back(raw.substr(0, eq), std::move(values));
            }
            const poweruct::GridResult grid = poweruct::grid_search(cfg, axes, increase_p);
            poweruct::emit_results_to(grid.rows, cfg);
            std::cerr << "best:";
            for (const auto& [key, value] : grid.best_assignment)
                std::cerr << ' ' << key << '=' << value;
            std::cerr << " mean=" << grid.rows[grid.best_index].mean << '\n';
        } else if (checks_cmd->parsed()) {
            const auto reports = poweruct::run_default_checks(checks_seed);
            if (checks_out.empty()) {
                poweruct::write_reports_jsonl(reports, std::cout);
            } else {
                std::ofstream out(checks_out, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + checks_out);
                poweruct::write_reports_jsonl(reports, out);
            }
            for (const auto& r : reports)
                if (!r.passed) return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
