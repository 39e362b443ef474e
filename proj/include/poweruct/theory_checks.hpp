#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace poweruct {

/// Outcome of one statistical check. `passed` is a pure function of the two
/// recorded values and the check's comparison rule.
struct CheckReport {
    std::string check_name;
    long trials = 0;
    double empirical_value = 0.0;
    double analytic_bound_or_reference = 0.0;
    bool passed = false;
    std::uint64_t seed = 0;
};

/// Bernoulli bandit instance description for the bandit-based checks. With
/// `randomize_per_seed`, each seed draws its own uniform[0,1] arm means.
struct TestbedSpec {
    std::vector<double> means;       // used when randomize_per_seed is false
    int arm_count = 0;               // used when randomize_per_seed is true
    bool randomize_per_seed = false;
};

/// Tail frequency of |power mean - mean| > epsilon for n i.i.d. uniform[0.1,
/// 0.9] draws versus the analytic bound (value range (0,1)). Passes when the
/// bound is vacuous (>= 1) or the frequency is within 3 binomial sigmas.
CheckReport check_concentration(long n, double p, double epsilon, long trials,
                                std::uint64_t seed);

/// Mean suboptimal pulls across the horizon ladder must grow at most like
/// 4 log(t): T(h_last)/T(h_first) <= 4 log(h_last)/log(h_first). Gap-zero
/// testbeds pass trivially (no suboptimal arm).
CheckReport check_suboptimal_growth(const TestbedSpec& testbed, double p,
                                    std::span<const std::int64_t> horizons, int seeds,
                                    std::uint64_t seed, double exploration_c);

/// Empirical P(greedy arm != optimal) must be non-increasing across
/// checkpoints within +-0.02 and below 0.1 at the last checkpoint.
CheckReport check_failure_decay(const TestbedSpec& testbed, double p,
                                std::span<const std::int64_t> checkpoints, int seeds,
                                std::uint64_t seed, double exploration_c);

/// Root-value bias |E[root value] - optimal| on a known Bernoulli tree must
/// decrease across the simulation ladder (3 sigma slack per step).
CheckReport check_tree_bias(int depth, int branching, std::vector<double> leaf_means,
                            double p, std::span<const std::int64_t> simulation_ladder,
                            int seeds, std::uint64_t seed, double exploration_c);

/// The shipped default suite with fixed seeds; every report should pass.
std::vector<CheckReport> run_default_checks(std::uint64_t seed = 20240901);

/// One JSON object per line.
void write_reports_jsonl(std::span<const CheckReport> reports, std::ostream& out);

}  // namespace poweruct
