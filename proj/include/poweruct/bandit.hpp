#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <poweruct/power_mean.hpp>
#include <poweruct/rng.hpp>

namespace poweruct {

/// Running statistics of one arm. The power sum representation is exact for
/// the estimator and keeps memory constant regardless of pull count.
struct ArmStats {
    std::int64_t pulls = 0;
    double reward_sum = 0.0;        // for the arithmetic estimator and diagnostics
    double reward_power_sum = 0.0;  // sum of reward^p for finite orders
    double estimate = 0.0;          // current value estimate under the configured order
};

struct BanditConfig {
    double exploration_c;
    PowerOrder order;
    int arm_count;
};

/// Bernoulli testbed with known means. The optimal arm index is defined by
/// lowest-index tie-breaking so failure indicators are well defined even for
/// degenerate gap-zero instances.
struct BanditTestbed {
    std::vector<double> arm_means;
    std::uint64_t rng_seed = 0;

    int optimal_arm() const;
    double best_mean() const;
    double gap(int arm) const;  // best_mean - arm_means[arm]
};

/// UCB1 selection: any unpulled arm first (uniformly at random among them),
/// otherwise argmax of estimate + C sqrt(log(total_pulls) / pulls), ties
/// broken uniformly at random from the caller's stream.
int select_arm(std::span<const ArmStats> stats, const BanditConfig& config,
               std::int64_t total_pulls, Rng& rng);

/// Incorporates one reward in [0, 1] and refreshes the estimate.
void update_arm(ArmStats& stats, double reward, PowerOrder order);

struct BanditCheckpoint {
    std::int64_t t = 0;
    bool greedy_failure = false;         // argmax estimate differs from the optimal arm
    std::int64_t suboptimal_pulls = 0;   // sum of T_k(t) over k != optimal
};

struct BanditRunResult {
    std::vector<std::int64_t> pulls;  // T_k(horizon)
    std::vector<BanditCheckpoint> checkpoints;
};

/// Plays UCB1 for `horizon` steps on the Bernoulli testbed, recording the
/// failure indicator at each requested checkpoint.
BanditRunResult run_bandit(const BanditTestbed& testbed, const BanditConfig& config,
                           std::int64_t horizon,
                           std::span<const std::int64_t> checkpoints = {});

}  // namespace poweruct
