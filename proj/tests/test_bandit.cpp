#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include <poweruct/bandit.hpp>

using namespace poweruct;

TEST_CASE("select_arm basics") {
    Rng rng(1);
    const BanditConfig cfg{std::numbers::sqrt2, PowerOrder::finite(1.0), 2};

    SUBCASE("single arm") {
        std::vector<ArmStats> stats(1);
        stats[0].pulls = 3;
        const BanditConfig one{std::numbers::sqrt2, PowerOrder::finite(1.0), 1};
        CHECK(select_arm(stats, one, 3, rng) == 0);
    }
    SUBCASE("unpulled arm precedes any UCB comparison") {
        std::vector<ArmStats> stats(2);
        stats[0].pulls = 3;
        stats[0].estimate = 0.99;
        CHECK(select_arm(stats, cfg, 3, rng) == 1);
    }
    SUBCASE("hand-evaluated UCB scores") {
        // pulls (10, 2), estimates (0.5, 0.6), n = 12, C = sqrt(2):
        // scores are about 1.205 and 2.176, so arm 1 wins.
        std::vector<ArmStats> stats(2);
        stats[0].pulls = 10;
        stats[0].estimate = 0.5;
        stats[1].pulls = 2;
        stats[1].estimate = 0.6;
        CHECK(select_arm(stats, cfg, 12, rng) == 1);
        const double s0 = 0.5 + std::numbers::sqrt2 * std::sqrt(std::log(12.0) / 10.0);
        const double s1 = 0.6 + std::numbers::sqrt2 * std::sqrt(std::log(12.0) / 2.0);
        CHECK(s0 == doctest::Approx(1.205).epsilon(1e-3));
        CHECK(s1 == doctest::Approx(2.176).epsilon(1e-3));
    }
    SUBCASE("empty stats is an error") {
        std::vector<ArmStats> stats;
        CHECK_THROWS_AS(select_arm(stats, cfg, 0, rng), std::invalid_argument);
    }
}

TEST_CASE("update_arm estimators") {
    SUBCASE("fresh arm at p = 1") {
        ArmStats s;
        update_arm(s, 0.7, PowerOrder::finite(1.0));
        CHECK(s.pulls == 1);
        CHECK(s.estimate == doctest::Approx(0.7).epsilon(1e-15));
    }
    SUBCASE("two rewards at p = 2 give sqrt(0.34)") {
        ArmStats s;
        update_arm(s, 0.2, PowerOrder::finite(2.0));
        update_arm(s, 0.8, PowerOrder::finite(2.0));
        CHECK(s.estimate == doctest::Approx(0.5830951894845301).epsilon(1e-12));
    }
    SUBCASE("max estimator") {
        ArmStats s;
        update_arm(s, 0.2, PowerOrder::plus_infinity());
        update_arm(s, 0.8, PowerOrder::plus_infinity());
        update_arm(s, 0.3, PowerOrder::plus_infinity());
        CHECK(s.estimate == 0.8);
    }
    SUBCASE("rewards must be pre-scaled") {
        ArmStats s;
        CHECK_THROWS_WITH_AS(update_arm(s, 1.5, PowerOrder::finite(1.0)),
                             "reward must be pre-scaled", std::invalid_argument);
        CHECK_THROWS_AS(update_arm(s, -0.1, PowerOrder::finite(1.0)), std::invalid_argument);
    }
}

TEST_CASE("p = 1 power estimator is bit-identical to the arithmetic mean") {
    Rng rng(99);
    ArmStats power, arithmetic;
    for (int i = 0; i < 5000; ++i) {
        const double r = rng.uniform01();
        update_arm(power, r, PowerOrder::finite(1.0));
        arithmetic.pulls += 1;
        arithmetic.reward_sum += r;
        arithmetic.estimate = arithmetic.reward_sum / static_cast<double>(arithmetic.pulls);
        REQUIRE(std::memcmp(&power.estimate, &arithmetic.estimate, sizeof(double)) == 0);
    }
}

TEST_CASE("estimates are monotone in p for a fixed reward history") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> rewards;
        const int n = 1 + static_cast<int>(rng.uniform_below(40));
        for (int i = 0; i < n; ++i) rewards.push_back(rng.uniform01());
        double prev = -1.0;
        for (double p : {1.0, 1.5, 2.0, 4.0, 8.0, 32.0}) {
            ArmStats s;
            for (double r : rewards) update_arm(s, r, PowerOrder::finite(p));
            REQUIRE(s.estimate >= prev - 1e-12);
            prev = s.estimate;
        }
        ArmStats max_stats;
        for (double r : rewards) update_arm(max_stats, r, PowerOrder::plus_infinity());
        REQUIRE(max_stats.estimate >= prev - 1e-9);
    }
}

TEST_CASE("run_bandit trivial cases") {
    SUBCASE("one arm gets every pull and never fails") {
        BanditTestbed tb{{0.4}, 7};
        const std::int64_t cps[] = {10, 100};
        const auto run = run_bandit(tb, {std::numbers::sqrt2, PowerOrder::finite(1.0), 1}, 100, cps);
        CHECK(run.pulls[0] == 100);
        for (const auto& cp : run.checkpoints) {
            CHECK_FALSE(cp.greedy_failure);
            CHECK(cp.suboptimal_pulls == 0);
        }
    }
    SUBCASE("horizon must cover initialization") {
        BanditTestbed tb{{0.4, 0.5}, 7};
        CHECK_THROWS_AS(run_bandit(tb, {1.0, PowerOrder::finite(1.0), 2}, 1, {}),
                        std::invalid_argument);
    }
}

TEST_CASE("suboptimal pulls grow sub-linearly") {
    // T(4n) - T(n) <= T(n) for n >= 1e3, averaged over seeds, gap 0.8.
    const std::int64_t cps[] = {1000, 4000};
    double t_n = 0.0, t_4n = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        BanditTestbed tb{{0.9, 0.1}, derive_seed(555, s)};
        const auto run =
            run_bandit(tb, {std::numbers::sqrt2, PowerOrder::finite(2.0), 2}, 4000, cps);
        t_n += static_cast<double>(run.checkpoints[0].suboptimal_pulls);
        t_4n += static_cast<double>(run.checkpoints[1].suboptimal_pulls);
    }
    t_n /= seeds;
    t_4n /= seeds;
    CHECK(t_4n - t_n <= t_n);
}

TEST_CASE("failure probability decays across checkpoints") {
    const std::int64_t cps[] = {100, 1000, 10000};
    int fail_first = 0, fail_last = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        Rng mean_rng(derive_seed(777, s));
        std::vector<double> means;
        for (int k = 0; k < 10; ++k) means.push_back(mean_rng.uniform01());
        BanditTestbed tb{means, derive_seed(778, s)};
        const auto run =
            run_bandit(tb, {std::numbers::sqrt2, PowerOrder::finite(2.0), 10}, 10000, cps);
        fail_first += run.checkpoints.front().greedy_failure ? 1 : 0;
        fail_last += run.checkpoints.back().greedy_failure ? 1 : 0;
    }
    const double p_first = static_cast<double>(fail_first) / seeds;
    const double p_last = static_cast<double>(fail_last) / seeds;
    CHECK(p_last < p_first);
    CHECK(p_last <= p_first + 0.02);
}
