#include <poweruct/theory_checks.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include <poweruct/bandit.hpp>
#include <poweruct/environments/bernoulli_tree.hpp>
#include <poweruct/power_mean.hpp>
#include <poweruct/rng.hpp>
#include <poweruct/tree_search_mdp.hpp>

namespace poweruct {

namespace {

BanditTestbed make_testbed(const TestbedSpec& spec, std::uint64_t run_seed, Rng& mean_rng) {
    BanditTestbed tb;
    if (spec.randomize_per_seed) {
        if (spec.arm_count < 1) throw std::invalid_argument("testbed arm_count must be >= 1");
        tb.arm_means.reserve(spec.arm_count);
        for (int i = 0; i < spec.arm_count; ++i) tb.arm_means.push_back(mean_rng.uniform01());
    } else {
        if (spec.means.empty()) throw std::invalid_argument("testbed means must be non-empty");
        tb.arm_means = spec.means;
    }
    tb.rng_seed = run_seed;
    return tb;
}

}  // namespace

CheckReport check_concentration(long n, double p, double epsilon, long trials,
                                std::uint64_t seed) {
    constexpr double kLow = 0.1, kHigh = 0.9;
    const double mean = 0.5 * (kLow + kHigh);
    const PowerOrder order = PowerOrder::finite(p);
    Rng rng(seed);
    std::vector<double> values(n), weights(n, 1.0);
    long exceed = 0;
    for (long t = 0; t < trials; ++t) {
        for (long i = 0; i < n; ++i) values[i] = rng.uniform(kLow, kHigh);
        const double m = power_mean(values, weights, order);
        if (std::abs(m - mean) > epsilon) ++exceed;
    }
    const double tail = static_cast<double>(exceed) / static_cast<double>(trials);
    // At epsilon = 0 the exponential factor is 1 and the bound 2 exp(H) is
    // vacuous; keep that case checkable even though the bound function
    // itself requires epsilon > 0.
    const double bound =
        epsilon == 0.0
            ? 2.0 * std::exp(p == 1.0 ? 0.0 : hoelder_bounds(kLow, kHigh, p, 1.0).H)
            : concentration_bound(n, epsilon, p, kLow, kHigh, 0.0, 1.0);

    CheckReport report{"concentration", trials, tail, bound, false, seed};
    const double sigma = std::sqrt(std::max(bound * (1.0 - bound), 0.0) /
                                   static_cast<double>(trials));
    report.passed = bound >= 1.0 || tail <= bound + 3.0 * sigma;
    return report;
}

CheckReport check_suboptimal_growth(const TestbedSpec& testbed, double p,
                                    std::span<const std::int64_t> horizons, int seeds,
                                    std::uint64_t seed, double exploration_c) {
    if (horizons.size() < 2) throw std::invalid_argument("need at least two horizons");
    Rng mean_rng(derive_seed(seed, 0, 0x6d65616e));
    std::vector<double> mean_pulls(horizons.size(), 0.0);
    bool any_gap = false;
    for (int s = 0; s < seeds; ++s) {
        const BanditTestbed tb = make_testbed(testbed, derive_seed(seed, s, 1), mean_rng);
        bool has_suboptimal = false;
        for (std::size_t k = 0; k < tb.arm_means.size(); ++k)
            if (tb.gap(static_cast<int>(k)) > 0.0) has_suboptimal = true;
        if (!has_suboptimal) continue;
        any_gap = true;
        const BanditConfig cfg{exploration_c, PowerOrder::finite(p),
                               static_cast<int>(tb.arm_means.size())};
        const BanditRunResult run = run_bandit(tb, cfg, horizons.back(), horizons);
        for (std::size_t j = 0; j < horizons.size(); ++j)
            mean_pulls[j] += static_cast<double>(run.checkpoints[j].suboptimal_pulls);
    }

    CheckReport report{"suboptimal_growth", seeds, 0.0, 0.0, false, seed};
    if (!any_gap) {
        // No suboptimal arm: nothing to bound.
        report.passed = true;
        return report;
    }
    for (double& v : mean_pulls) v /= seeds;
    const double ratio = mean_pulls.back() / mean_pulls.front();
    const double limit = 4.0 * std::log(static_cast<double>(horizons.back())) /
                         std::log(static_cast<double>(horizons.front()));
    report.empirical_value = ratio;
    report.analytic_bound_or_reference = limit;
    report.passed = ratio <= limit;
    return report;
}

CheckReport check_failure_decay(const TestbedSpec& testbed, double p,
                                std::span<const std::int64_t> checkpoints, int seeds,
                                std::uint64_t seed, double exploration_c) {
    if (checkpoints.empty()) throw std::invalid_argument("need at least one checkpoint");
    constexpr double kNoise = 0.02;
    constexpr double kFinalLimit = 0.1;
    Rng mean_rng(derive_seed(seed, 0, 0x6d65616e));
    std::vector<double> failure(checkpoints.size(), 0.0);
    for (int s = 0; s < seeds; ++s) {
        const BanditTestbed tb = make_testbed(testbed, derive_seed(seed, s, 2), mean_rng);
        const BanditConfig cfg{exploration_c, PowerOrder::finite(p),
                               static_cast<int>(tb.arm_means.size())};
        const BanditRunResult run = run_bandit(tb, cfg, checkpoints.back(), checkpoints);
        for (std::size_t j = 0; j < checkpoints.size(); ++j)
            if (run.checkpoints[j].greedy_failure) failure[j] += 1.0;
    }
    for (double& v : failure) v /= seeds;

    bool monotone = true;
    for (std::size_t j = 1; j < failure.size(); ++j)
        if (failure[j] > failure[j - 1] + kNoise) monotone = false;

    CheckReport report{"failure_decay", seeds, failure.back(), kFinalLimit, false, seed};
    report.passed = monotone && failure.back() < kFinalLimit;
    return report;
}

CheckReport check_tree_bias(int depth, int branching, std::vector<double> leaf_means,
                            double p, std::span<const std::int64_t> simulation_ladder,
                            int seeds, std::uint64_t seed, double exploration_c) {
    if (simulation_ladder.size() < 2) throw std::invalid_argument("need a simulation ladder");
    const envs::BernoulliTree model(depth, branching, std::move(leaf_means));
    double optimal = 0.0;
    for (double m : model.leaf_means()) optimal = std::max(optimal, m);

    std::vector<double> bias(simulation_ladder.size(), 0.0);
    std::vector<double> spread(simulation_ladder.size(), 0.0);
    for (std::size_t j = 0; j < simulation_ladder.size(); ++j) {
        double sum = 0.0, sum_sq = 0.0;
        for (int s = 0; s < seeds; ++s) {
            SearchConfig cfg;
            cfg.order = PowerOrder::finite(p);
            cfg.exploration_c = exploration_c;
            cfg.gamma = 1.0;
            cfg.simulations_per_move = simulation_ladder[j];
            cfg.max_depth = depth + 1;
            cfg.rng_seed = derive_seed(seed, s, 0x10 + j);
            MdpPlanner<envs::BernoulliTree> planner(model, cfg);
            planner.plan(model.initial_state());
            const double value = planner.root()->value;
            sum += value;
            sum_sq += value * value;
        }
        const double avg = sum / seeds;
        bias[j] = std::abs(avg - optimal);
        const double var = std::max(sum_sq / seeds - avg * avg, 0.0);
        spread[j] = std::sqrt(var / seeds);  // standard error of the mean
    }

    bool decreasing = true;
    for (std::size_t j = 1; j < bias.size(); ++j)
        if (bias[j] > bias[j - 1] + 3.0 * (spread[j] + spread[j - 1])) decreasing = false;

    CheckReport report{"tree_bias", seeds, bias.back(), bias.front(), false, seed};
    report.passed = decreasing && bias.back() < bias.front();
    return report;
}

std::vector<CheckReport> run_default_checks(std::uint64_t seed) {
    std::vector<CheckReport> reports;
    const std::int64_t ladder[] = {100, 1000, 10000};

    reports.push_back(check_concentration(1000, 2.0, 0.1, 10000, derive_seed(seed, 1)));

    TestbedSpec two_arm;
    two_arm.means = {0.9, 0.1};
    reports.push_back(
        check_suboptimal_growth(two_arm, 2.0, ladder, 100, derive_seed(seed, 2), std::numbers::sqrt2));

    reports.push_back(
        check_failure_decay(two_arm, 2.0, ladder, 200, derive_seed(seed, 3), std::numbers::sqrt2));
    TestbedSpec ten_arm;
    ten_arm.arm_count = 10;
    ten_arm.randomize_per_seed = true;
    reports.push_back(
        check_failure_decay(ten_arm, 2.0, ladder, 200, derive_seed(seed, 4), std::numbers::sqrt2));

    reports.push_back(check_tree_bias(2, 2, {0.9, 0.1, 0.5, 0.5}, 2.0, ladder, 500,
                                      derive_seed(seed, 5), std::numbers::sqrt2));
    return reports;
}

void write_reports_jsonl(std::span<const CheckReport> reports, std::ostream& out) {
    for (const auto& r : reports) {
        nlohmann::json j{{"check_name", r.check_name},
                         {"trials", r.trials},
                         {"empirical_value", r.empirical_value},
                         {"analytic_bound_or_reference", r.analytic_bound_or_reference},
                         {"passed", r.passed},
                         {"seed", r.seed}};
        out << j.dump() << '\n';
    }
}

}  // namespace poweruct
