#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <poweruct/harness.hpp>

using namespace poweruct;

TEST_CASE("power order formatting round trip") {
    CHECK(format_power_order(PowerOrder::plus_infinity()) == "max");
    CHECK(format_power_order(PowerOrder::finite(2.2)) == "2.2");
    CHECK(parse_power_order("max").is_infinite());
    CHECK(parse_power_order("2.2").value() == 2.2);
    CHECK_THROWS_AS(parse_power_order("2.x"), std::invalid_argument);
}

TEST_CASE("apply_option handles every flag and rejects unknown keys") {
    ExperimentConfig cfg;
    apply_option(cfg, "env", "copy");
    apply_option(cfg, "algo", "power_uct");
    apply_option(cfg, "p", "3");
    apply_option(cfg, "c", "7.5");
    apply_option(cfg, "gamma", "1.0");
    apply_option(cfg, "sims", "2048");
    apply_option(cfg, "runs", "10");
    apply_option(cfg, "seed", "99");
    apply_option(cfg, "plan_once", "true");
    apply_option(cfg, "workers", "2");
    apply_option(cfg, "alphabet", "36");
    apply_option(cfg, "tape", "40");
    CHECK(cfg.env == EnvId::copy);
    CHECK(cfg.algo == Algo::power_uct);
    CHECK(cfg.p.value() == 3.0);
    CHECK(cfg.exploration_c == 7.5);
    CHECK(cfg.simulations == 2048);
    CHECK(cfg.plan_once);
    CHECK_THROWS_AS(apply_option(cfg, "nonsense", "1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_option(cfg, "plan_once", "sometimes"), std::invalid_argument);
}

TEST_CASE("config files parse key=value lines with comments") {
    const char* path = "harness_test_config.tmp";
    {
        std::ofstream out(path);
        out << "# comment line\n"
               "env = frozenlake\n"
               "algo=uct   # trailing comment\n"
               "\n"
               "sims = 64\n";
    }
    const auto options = parse_config_file(path);
    REQUIRE(options.size() == 3);
    CHECK(options[0] == std::pair<std::string, std::string>{"env", "frozenlake"});
    CHECK(options[2].second == "64");
    ExperimentConfig cfg;
    for (const auto& [k, v] : options) apply_option(cfg, k, v);
    CHECK(cfg.simulations == 64);
    std::remove(path);
    CHECK_THROWS_AS(parse_config_file("does_not_exist.cfg"), std::runtime_error);
}

TEST_CASE("emit_results formats and fails on empty input") {
    ResultRow row;
    row.env = "frozenlake";
    row.algo = "uct";
    row.p = "1";
    row.exploration_c = 1.0;
    row.gamma = 1.0;
    row.simulations = 64;
    row.runs = 8;
    row.mean = 0.125;
    row.std_dev = 0.3535533906;
    row.std_error = 0.125;
    row.seconds = 0.0;
    const std::vector<ResultRow> rows{row};

    std::ostringstream a, b;
    emit_results(rows, "csv", a);
    emit_results(rows, "csv", b);
    CHECK(a.str() == b.str());  // byte-stable
    std::istringstream lines(a.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "env,algo,p,C,gamma,sims,runs,mean,std_dev,std_error,seconds");
    std::string body;
    std::getline(lines, body);
    CHECK(body == "frozenlake,uct,1,1,1,64,8,0.125,0.3535533906,0.125,0.000");

    std::ostringstream j;
    emit_results(rows, "json", j);
    CHECK(j.str().find("\"mean\": 0.125") != std::string::npos);

    const std::vector<ResultRow> empty;
    std::ostringstream sink;
    CHECK_THROWS_AS(emit_results(empty, "csv", sink), std::invalid_argument);
    CHECK_THROWS_AS(emit_results(rows, "xml", sink), std::invalid_argument);
}

TEST_CASE("config validation catches bad pairings") {
    ExperimentConfig cfg;
    cfg.env = EnvId::frozen_lake;
    cfg.algo = Algo::pomcp;
    cfg.runs = 2;
    cfg.simulations = 8;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    ExperimentConfig zero_runs;
    zero_runs.runs = 0;
    CHECK_THROWS_AS(run_experiment(zero_runs), std::invalid_argument);
}

TEST_CASE("experiments are reproducible regardless of worker count") {
    ExperimentConfig cfg;
    cfg.env = EnvId::frozen_lake;
    cfg.algo = Algo::power_uct;
    cfg.p = PowerOrder::finite(2.2);
    cfg.simulations = 48;
    cfg.runs = 6;
    cfg.base_seed = 11;

    cfg.workers = 1;
    const ResultRow serial = run_experiment(cfg);
    cfg.workers = 2;
    const ResultRow parallel = run_experiment(cfg);
    CHECK(serial.mean == parallel.mean);
    CHECK(serial.std_dev == parallel.std_dev);

    // aggregation matches an independent recomputation of the episode returns
    const auto returns = run_episode_returns(cfg);
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= returns.size();
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / (returns.size() - 1));
    CHECK(serial.mean == doctest::Approx(mean).epsilon(1e-15));
    CHECK(serial.std_dev == doctest::Approx(sd).epsilon(1e-12));
    CHECK(serial.std_error == doctest::Approx(sd / std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("copy experiment with plan_once runs end to end") {
    ExperimentConfig cfg;
    cfg.env = EnvId::copy;
    cfg.algo = Algo::power_uct;
    cfg.p = PowerOrder::finite(3.0);
    cfg.exploration_c = 20.0;
    cfg.simulations = 256;
    cfg.runs = 3;
    cfg.copy_alphabet = 8;
    cfg.copy_tape = 10;
    cfg.plan_once = true;
    cfg.workers = 2;
    const ResultRow row = run_experiment(cfg);
    CHECK(row.mean >= 0.0);
    CHECK(row.mean <= 10.0);
    CHECK(row.runs == 3);
}

TEST_CASE("pomdp experiment runs end to end") {
    ExperimentConfig cfg;
    cfg.env = EnvId::rock_sample;
    cfg.algo = Algo::power_pomcp;
    cfg.p = PowerOrder::finite(2.0);
    cfg.rock_n = 5;
    cfg.rock_k = 3;
    cfg.simulations = 128;
    cfg.runs = 3;
    cfg.step_limit = 40;
    cfg.workers = 2;
    const ResultRow row = run_experiment(cfg);
    CHECK(row.gamma == 0.95);
    CHECK(row.exploration_c == 1.0);  // scaled reward span
}

TEST_CASE("grid search returns the best cell") {
    ExperimentConfig cfg;
    cfg.env = EnvId::frozen_lake;
    cfg.algo = Algo::power_uct;
    cfg.simulations = 24;
    cfg.runs = 4;
    cfg.base_seed = 5;

    SUBCASE("single cell") {
        const GridResult g = grid_search(cfg, {{"p", {"2"}}});
        REQUIRE(g.rows.size() == 1);
        CHECK(g.best_index == 0);
        CHECK(g.best_assignment[0] == std::pair<std::string, std::string>{"p", "2"});
    }
    SUBCASE("two axes expand the cartesian product") {
        const GridResult g = grid_search(cfg, {{"p", {"1", "2"}}, {"c", {"0.5", "1"}}});
        CHECK(g.rows.size() == 4);
        double best = -1.0;
        for (const auto& row : g.rows) best = std::max(best, row.mean);
        CHECK(g.rows[g.best_index].mean == best);
    }
    SUBCASE("increase-p mode stops after a decrease") {
        const GridResult g = grid_search(cfg, {{"p", {"1", "2", "4", "8"}}}, true);
        CHECK(g.rows.size() >= 1);
        CHECK(g.rows.size() <= 4);
        CHECK(g.best_assignment.size() == 1);
    }
}
