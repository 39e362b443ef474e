#include <poweruct/bandit.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace poweruct {

int BanditTestbed::optimal_arm() const {
    if (arm_means.empty()) throw std::invalid_argument("testbed has no arms");
    int best = 0;
    for (int i = 1; i < static_cast<int>(arm_means.size()); ++i)
        if (arm_means[i] > arm_means[best]) best = i;
    return best;
}

double BanditTestbed::best_mean() const { return arm_means[optimal_arm()]; }

double BanditTestbed::gap(int arm) const { return best_mean() - arm_means.at(arm); }

int select_arm(std::span<const ArmStats> stats, const BanditConfig& config,
               std::int64_t total_pulls, Rng& rng) {
    if (stats.empty()) throw std::invalid_argument("select_arm: no arms");
    if (total_pulls < 0) throw std::invalid_argument("select_arm: negative total_pulls");

    std::vector<int> candidates;
    for (int i = 0; i < static_cast<int>(stats.size()); ++i)
        if (stats[i].pulls == 0) candidates.push_back(i);
    if (!candidates.empty()) return rng.pick(candidates);

    const double log_total = std::log(static_cast<double>(total_pulls));
    double best_score = -1.0;
    for (int i = 0; i < static_cast<int>(stats.size()); ++i) {
        const double score =
            stats[i].estimate +
            config.exploration_c * std::sqrt(log_total / static_cast<double>(stats[i].pulls));
        if (score > best_score) {
            best_score = score;
            candidates.clear();
            candidates.push_back(i);
        } else if (score == best_score) {
            candidates.push_back(i);
        }
    }
    return rng.pick(candidates);
}

void update_arm(ArmStats& stats, double reward, PowerOrder order) {
    if (!(reward >= 0.0) || !(reward <= 1.0))
        throw std::invalid_argument("reward must be pre-scaled");
    stats.pulls += 1;
    stats.reward_sum += reward;
    if (order.is_infinite()) {
        stats.estimate = (stats.pulls == 1) ? reward : std::max(stats.estimate, reward);
        return;
    }
    const double p = order.value();
    if (p == 1.0) {
        stats.reward_power_sum += reward;
        stats.estimate = stats.reward_power_sum / static_cast<double>(stats.pulls);
    } else {
        stats.reward_power_sum += std::pow(reward, p);
        stats.estimate = std::clamp(
            std::pow(stats.reward_power_sum / static_cast<double>(stats.pulls), 1.0 / p), 0.0,
            1.0);
    }
}

BanditRunResult run_bandit(const BanditTestbed& testbed, const BanditConfig& config,
                           std::int64_t horizon,
                           std::span<const std::int64_t> checkpoints) {
    const int arms = static_cast<int>(testbed.arm_means.size());
    if (arms < 1) throw std::invalid_argument("testbed has no arms");
    if (config.arm_count != arms)
        throw std::invalid_argument("config arm_count does not match testbed");
    if (horizon < arms) throw std::invalid_argument("horizon must be >= arm_count");

    Rng rng(testbed.rng_seed);
    std::vector<ArmStats> stats(arms);
    const int optimal = testbed.optimal_arm();

    BanditRunResult result;
    result.checkpoints.reserve(checkpoints.size());

    auto greedy_arm = [&stats, arms] {
        int best = 0;
        for (int i = 1; i < arms; ++i)
            if (stats[i].estimate > stats[best].estimate) best = i;
        return best;
    };

    std::size_t next_checkpoint = 0;
    for (std::int64_t t = 0; t < horizon; ++t) {
        const int arm = select_arm(stats, config, t, rng);
        const double reward = rng.bernoulli(testbed.arm_means[arm]) ? 1.0 : 0.0;
        update_arm(stats[arm], reward, config.order);
        while (next_checkpoint < checkpoints.size() && t + 1 == checkpoints[next_checkpoint]) {
            std::int64_t suboptimal = 0;
            for (int i = 0; i < arms; ++i)
                if (i != optimal) suboptimal += stats[i].pulls;
            result.checkpoints.push_back({t + 1, greedy_arm() != optimal, suboptimal});
            ++next_checkpoint;
        }
    }

    result.pulls.reserve(arms);
    for (const auto& s : stats) result.pulls.push_back(s.pulls);
    return result;
}

}  // namespace poweruct
