#include <poweruct/harness.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include <poweruct/environments/copy_env.hpp>
#include <poweruct/environments/frozen_lake.hpp>
#include <poweruct/environments/pocman.hpp>
#include <poweruct/environments/rock_sample.hpp>
#include <poweruct/rng.hpp>
#include <poweruct/tree_search_mdp.hpp>
#include <poweruct/tree_search_pomdp.hpp>

namespace poweruct {

namespace {

constexpr std::uint64_t kEnvStream = 0xE1;
constexpr std::uint64_t kPlannerStream = 0x91;
constexpr std::uint64_t kTapeStream = 0x7A;

bool is_pomdp_env(EnvId env) { return env == EnvId::rock_sample || env == EnvId::pocman; }
bool is_pomdp_algo(Algo algo) { return algo == Algo::pomcp || algo == Algo::power_pomcp; }

BackupKind backup_kind_for(Algo algo) {
    switch (algo) {
        case Algo::uct:
        case Algo::pomcp:
            return BackupKind::average_reference;
        case Algo::max_uct:
            return BackupKind::max_reference;
        case Algo::ments:
            return BackupKind::ments_softmax;
        default:
            return BackupKind::power_mean;
    }
}

SearchConfig search_config_for(const ExperimentConfig& cfg, std::uint64_t planner_seed) {
    SearchConfig sc;
    sc.order = cfg.p;
    sc.exploration_c = cfg.resolved_exploration_c();
    sc.gamma = cfg.resolved_gamma();
    sc.rollout_cutoff_eps = cfg.rollout_eps;
    sc.simulations_per_move = cfg.simulations;
    sc.backup_kind = backup_kind_for(cfg.algo);
    sc.ments_temperature = cfg.ments_tau;
    sc.ments_exploration = cfg.ments_eps;
    sc.rng_seed = planner_seed;
    sc.max_depth = cfg.resolved_step_limit();
    sc.reuse_tree = cfg.reuse_tree;
    sc.heuristic_rollouts = cfg.heuristic_rollouts;
    return sc;
}

template <class Model>
double run_mdp_episode(const Model& model, const ExperimentConfig& cfg, std::uint64_t episode) {
    Rng env_rng(derive_seed(cfg.base_seed, episode, kEnvStream));
    SearchConfig sc = search_config_for(cfg, derive_seed(cfg.base_seed, episode, kPlannerStream));
    MdpPlanner<Model> planner(model, sc);

    const double gamma = cfg.resolved_gamma();
    const int step_limit = cfg.resolved_step_limit();
    typename Model::State state = model.initial_state();
    double ret = 0.0, discount = 1.0;
    for (int t = 0; t < step_limit && !model.is_terminal(state); ++t) {
        const int action =
            (cfg.plan_once && t > 0) ? planner.greedy_action(state) : planner.plan(state);
        const Transition<typename Model::State> tr = model.sample(state, action, env_rng);
        ret += discount * tr.reward;
        discount *= gamma;
        planner.advance(action, tr.next_state);
        if (tr.terminal) break;
        state = tr.next_state;
    }
    return ret;
}

template <class Model>
double run_pomdp_episode(const Model& model, const ExperimentConfig& cfg, std::uint64_t episode) {
    Rng env_rng(derive_seed(cfg.base_seed, episode, kEnvStream));
    SearchConfig sc = search_config_for(cfg, derive_seed(cfg.base_seed, episode, kPlannerStream));
    PomdpPlanner<Model> planner(model, sc, cfg.belief_capacity);

    const double gamma = cfg.resolved_gamma();
    const int step_limit = cfg.resolved_step_limit();
    typename Model::State state = model.initial_state(env_rng);
    double ret = 0.0, discount = 1.0;
    for (int t = 0; t < step_limit && !model.is_terminal(state); ++t) {
        const int action = planner.plan();
        const PomdpStep<typename Model::State> step = model.sample(state, action, env_rng);
        ret += discount * step.reward;  // raw reward scale
        discount *= gamma;
        if (step.terminal) break;
        state = step.next_state;
        try {
            planner.advance(action, step.observation);
        } catch (const std::runtime_error&) {
            // Particle deprivation despite reinvigoration: restart the belief
            // from the prior rather than aborting the episode batch.
            planner.reset_root();
        }
    }
    return ret;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("evaluation_runs must be >= 1");
    if (cfg.simulations < 1) throw std::invalid_argument("simulations must be >= 1");
    if (is_pomdp_env(cfg.env) != is_pomdp_algo(cfg.algo))
        throw std::invalid_argument("algorithm '" + to_string(cfg.algo) +
                                    "' cannot run on environment '" + to_string(cfg.env) + "'");
    if (cfg.format != "csv" && cfg.format != "json")
        throw std::invalid_argument("format must be csv or json");
    if (cfg.plan_once && is_pomdp_env(cfg.env))
        throw std::invalid_argument("plan_once is only supported for MDP environments");
}

}  // namespace

std::string to_string(EnvId env) {
    switch (env) {
        case EnvId::frozen_lake: return "frozenlake";
        case EnvId::copy: return "copy";
        case EnvId::rock_sample: return "rocksample";
        case EnvId::pocman: return "pocman";
    }
    return "?";
}

std::string to_string(Algo algo) {
    switch (algo) {
        case Algo::uct: return "uct";
        case Algo::power_uct: return "power_uct";
        case Algo::max_uct: return "max_uct";
        case Algo::ments: return "ments";
        case Algo::pomcp: return "pomcp";
        case Algo::power_pomcp: return "power_pomcp";
    }
    return "?";
}

EnvId parse_env(const std::string& name) {
    if (name == "frozenlake") return EnvId::frozen_lake;
    if (name == "copy") return EnvId::copy;
    if (name == "rocksample") return EnvId::rock_sample;
    if (name == "pocman") return EnvId::pocman;
    throw std::invalid_argument("unknown environment: " + name);
}

Algo parse_algo(const std::string& name) {
    if (name == "uct") return Algo::uct;
    if (name == "power_uct") return Algo::power_uct;
    if (name == "max_uct") return Algo::max_uct;
    if (name == "ments") return Algo::ments;
    if (name == "pomcp") return Algo::pomcp;
    if (name == "power_pomcp") return Algo::power_pomcp;
    throw std::invalid_argument("unknown algorithm: " + name);
}

double ExperimentConfig::resolved_gamma() const {
    if (gamma >= 0.0) return gamma;
    return is_pomdp_env(env) ? 0.95 : 1.0;
}

double ExperimentConfig::resolved_exploration_c() const {
    if (exploration_c >= 0.0) return exploration_c;
    switch (env) {
        case EnvId::frozen_lake: return 1.0;
        case EnvId::copy: return 20.0;
        // Difference of max and min immediate reward, in scaled units.
        case EnvId::rock_sample: return 1.0;
        case EnvId::pocman: return 1.0;
    }
    return 1.0;
}

int ExperimentConfig::resolved_step_limit() const {
    if (step_limit > 0) return step_limit;
    switch (env) {
        case EnvId::frozen_lake: return envs::FrozenLake::kDefaultHorizon;
        case EnvId::copy: return 2 * copy_tape;
        case EnvId::rock_sample: return 200;
        case EnvId::pocman: return envs::PocMan::kDefaultHorizon;
    }
    return 200;
}

std::vector<double> run_episode_returns(const ExperimentConfig& cfg) {
    validate(cfg);
    std::vector<double> returns(cfg.runs, 0.0);

    std::function<double(std::uint64_t)> episode;
    // Shared immutable models; per-episode state lives in the runners.
    std::unique_ptr<envs::FrozenLake> frozen;
    std::unique_ptr<envs::RockSample> rocks;
    std::unique_ptr<envs::PocMan> pocman;
    switch (cfg.env) {
        case EnvId::frozen_lake: {
            const std::string grid = cfg.map_file.empty()
                                         ? envs::FrozenLake::default_map()
                                         : envs::load_grid_file(cfg.map_file);
            frozen = std::make_unique<envs::FrozenLake>(grid);
            episode = [&cfg, &frozen](std::uint64_t i) {
                return run_mdp_episode(*frozen, cfg, i);
            };
            break;
        }
        case EnvId::copy:
            episode = [&cfg](std::uint64_t i) {
                const envs::CopyEnv model(cfg.copy_alphabet, cfg.copy_tape,
                                          derive_seed(cfg.base_seed, i, kTapeStream));
                return run_mdp_episode(model, cfg, i);
            };
            break;
        case EnvId::rock_sample:
            rocks = std::make_unique<envs::RockSample>(cfg.rock_n, cfg.rock_k);
            episode = [&cfg, &rocks](std::uint64_t i) {
                return run_pomdp_episode(*rocks, cfg, i);
            };
            break;
        case EnvId::pocman: {
            const std::string maze = cfg.map_file.empty()
                                         ? envs::PocMan::default_maze()
                                         : envs::load_grid_file(cfg.map_file);
            pocman = std::make_unique<envs::PocMan>(maze);
            episode = [&cfg, &pocman](std::uint64_t i) {
                return run_pomdp_episode(*pocman, cfg, i);
            };
            break;
        }
    }

    int workers = cfg.workers > 0 ? cfg.workers
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, cfg.runs));
    if (workers == 1) {
        for (int i = 0; i < cfg.runs; ++i) returns[i] = episode(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < cfg.runs; i = next.fetch_add(1))
                    returns[i] = episode(i);
            });
        }
        for (auto& t : pool) t.join();
    }
    return returns;
}

ResultRow run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> returns = run_episode_returns(cfg);
    const auto stop = std::chrono::steady_clock::now();

    double sum = 0.0;
    for (double r : returns) sum += r;
    const double mean = sum / returns.size();
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    const double std_dev = returns.size() > 1 ? std::sqrt(ss / (returns.size() - 1)) : 0.0;

    ResultRow row;
    row.env = to_string(cfg.env);
    row.algo = to_string(cfg.algo);
    row.p = format_power_order(cfg.p);
    row.exploration_c = cfg.resolved_exploration_c();
    row.gamma = cfg.resolved_gamma();
    row.simulations = cfg.simulations;
    row.runs = cfg.runs;
    row.mean = mean;
    row.std_dev = std_dev;
    row.std_error = std_dev / std::sqrt(static_cast<double>(returns.size()));
    row.seconds = cfg.timing ? std::chrono::duration<double>(stop - start).count() : 0.0;
    return row;
}

GridResult grid_search(const ExperimentConfig& base,
                       const std::vector<std::pair<std::string, std::vector<std::string>>>& axes,
                       bool increase_p) {
    if (axes.empty()) throw std::invalid_argument("grid_search: no axes");
    for (const auto& [name, values] : axes)
        if (values.empty()) throw std::invalid_argument("grid_search: empty axis " + name);

    GridResult result;
    double best_mean = -std::numeric_limits<double>::infinity();

    if (increase_p) {
        // Increase p until performance starts to decrease.
        if (axes.size() != 1 || axes[0].first != "p")
            throw std::invalid_argument("increase_p mode needs a single 'p' axis");
        for (const auto& value : axes[0].second) {
            ExperimentConfig cfg = base;
            apply_option(cfg, "p", value);
            const ResultRow row = run_experiment(cfg);
            result.rows.push_back(row);
            if (row.mean > best_mean) {
                best_mean = row.mean;
                result.best_index = result.rows.size() - 1;
                result.best_assignment = {{"p", value}};
            } else {
                break;
            }
        }
        return result;
    }

    std::vector<std::size_t> index(axes.size(), 0);
    while (true) {
        ExperimentConfig cfg = base;
        std::vector<std::pair<std::string, std::string>> assignment;
        for (std::size_t d = 0; d < axes.size(); ++d) {
            apply_option(cfg, axes[d].first, axes[d].second[index[d]]);
            assignment.emplace_back(axes[d].first, axes[d].second[index[d]]);
        }
        const ResultRow row = run_experiment(cfg);
        result.rows.push_back(row);
        if (row.mean > best_mean) {
            best_mean = row.mean;
            result.best_index = result.rows.size() - 1;
            result.best_assignment = assignment;
        }
        std::size_t d = 0;
        for (; d < axes.size(); ++d) {
            if (++index[d] < axes[d].second.size()) break;
            index[d] = 0;
        }
        if (d == axes.size()) break;
    }
    return result;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string format_seconds(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::string format_power_order(PowerOrder p) {
    return p.is_infinite() ? "max" : format_double(p.value());
}

PowerOrder parse_power_order(const std::string& text) {
    if (text == "max" || text == "inf" || text == "infinity")
        return PowerOrder::plus_infinity();
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("bad power order: " + text);
    return PowerOrder::finite(v);
}

void emit_results(std::span<const ResultRow> rows, const std::string& format,
                  std::ostream& out) {
    if (rows.empty()) throw std::invalid_argument("no rows to emit");
    if (format == "csv") {
        out << "env,algo,p,C,gamma,sims,runs,mean,std_dev,std_error,seconds\n";
        for (const auto& r : rows) {
            out << r.env << ',' << r.algo << ',' << r.p << ',' << format_double(r.exploration_c)
                << ',' << format_double(r.gamma) << ',' << r.simulations << ',' << r.runs << ','
                << format_double(r.mean) << ',' << format_double(r.std_dev) << ','
                << format_double(r.std_error) << ',' << format_seconds(r.seconds)
                << '\n';
        }
    } else if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            arr.push_back({{"env", r.env},
                           {"algo", r.algo},
                           {"p", r.p},
                           {"C", r.exploration_c},
                           {"gamma", r.gamma},
                           {"sims", r.simulations},
                           {"runs", r.runs},
                           {"mean", r.mean},
                           {"std_dev", r.std_dev},
                           {"std_error", r.std_error},
                           {"seconds", r.seconds}});
        }
        out << arr.dump(2) << '\n';
    } else {
        throw std::invalid_argument("format must be csv or json");
    }
}

void emit_results_to(std::span<const ResultRow> rows, const ExperimentConfig& config) {
    if (config.out.empty()) {
        emit_results(rows, config.format, std::cout);
        return;
    }
    std::ofstream file(config.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write output file: " + config.out);
    emit_results(rows, config.format, file);
}

void apply_option(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    auto to_i64 = [&](const std::string& v) { return static_cast<std::int64_t>(std::stoll(v)); };
    auto to_bool = [&](const std::string& v) {
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw std::invalid_argument("bad boolean for " + key + ": " + v);
    };
    if (key == "env") cfg.env = parse_env(value);
    else if (key == "algo") cfg.algo = parse_algo(value);
    else if (key == "p") cfg.p = parse_power_order(value);
    else if (key == "c") cfg.exploration_c = std::stod(value);
    else if (key == "gamma") cfg.gamma = std::stod(value);
    else if (key == "eps") cfg.rollout_eps = std::stod(value);
    else if (key == "sims") cfg.simulations = to_i64(value);
    else if (key == "runs") cfg.runs = static_cast<int>(to_i64(value));
    else if (key == "seed") cfg.base_seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "plan_once") cfg.plan_once = to_bool(value);
    else if (key == "workers") cfg.workers = static_cast<int>(to_i64(value));
    else if (key == "out") cfg.out = value;
    else if (key == "format") cfg.format = value;
    else if (key == "timing") cfg.timing = to_bool(value);
    else if (key == "reuse_tree") cfg.reuse_tree = to_bool(value);
    else if (key == "heuristic_rollouts") cfg.heuristic_rollouts = to_bool(value);
    else if (key == "belief_capacity") cfg.belief_capacity = to_i64(value);
    else if (key == "step_limit") cfg.step_limit = static_cast<int>(to_i64(value));
    else if (key == "ments_tau") cfg.ments_tau = std::stod(value);
    else if (key == "ments_eps") cfg.ments_eps = std::stod(value);
    else if (key == "alphabet") cfg.copy_alphabet = static_cast<int>(to_i64(value));
    else if (key == "tape") cfg.copy_tape = static_cast<int>(to_i64(value));
    else if (key == "rock_n") cfg.rock_n = static_cast<int>(to_i64(value));
    else if (key == "rock_k") cfg.rock_k = static_cast<int>(to_i64(value));
    else if (key == "map") cfg.map_file = value;
    else throw std::invalid_argument("unknown option: " + key);
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> options;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto begin = s.find_first_not_of(" \t\r");
            if (begin == std::string::npos) return std::string{};
            const auto end = s.find_last_not_of(" \t\r");
            return s.substr(begin, end - begin + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected key=value");
        options.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return options;
}

}  // namespace poweruct
