#pragma once

#include <cstdint>
#include <vector>

#include <poweruct/rng.hpp>
#include <poweruct/tree_search_pomdp.hpp>

namespace poweruct::envs {

struct RockSampleState {
    std::int8_t x = 0;
    std::int8_t y = 0;
    std::uint64_t rock_good = 0;  // bit i: rock i is valuable
    bool done = false;
};

/// Mars-explorer grid task: determine which of the k rocks are valuable with
/// a noisy long-range sensor, sample the good ones, then exit east. Actions:
/// four moves, sample, and one sense per rock (k + 5 total). Observations:
/// none / good / bad.
class RockSample {
public:
    using State = RockSampleState;

    enum Action { kNorth = 0, kSouth = 1, kEast = 2, kWest = 3, kSample = 4, kSenseBase = 5 };
    enum Observation { kObsNone = 0, kObsGood = 1, kObsBad = 2 };

    struct Params {
        double sensor_half_distance = 20.0;  // d0 in accuracy 0.5 + 0.5 * 2^(-d/d0)
        double good_sample_reward = 10.0;
        double bad_sample_penalty = -10.0;
        double exit_reward = 10.0;
        double good_rock_prior = 0.5;
    };

    /// Rock layout is a pure function of (n, k) unless a layout seed is given.
    RockSample(int grid_size, int rock_count) : RockSample(grid_size, rock_count, Params()) {}
    RockSample(int grid_size, int rock_count, Params params, std::uint64_t layout_seed = 0);

    int action_count() const { return rock_count_ + 5; }
    bool is_terminal(const State& s) const { return s.done; }
    PomdpStep<State> sample(const State& s, int action, Rng& rng) const;
    State initial_state(Rng& rng) const;
    double reward_min() const { return params_.bad_sample_penalty; }
    double reward_max() const { return params_.good_sample_reward; }

    /// Reinvigoration hook: flips one random rock's hidden quality.
    void perturb(State& s, Rng& rng) const;

    int grid_size() const { return grid_size_; }
    int rock_count() const { return rock_count_; }
    std::pair<int, int> rock_position(int rock) const { return rocks_[rock]; }
    double sensor_accuracy(const State& s, int rock) const;

private:
    int grid_size_;
    int rock_count_;
    Params params_;
    std::vector<std::pair<int, int>> rocks_;
};

}  // namespace poweruct::envs
