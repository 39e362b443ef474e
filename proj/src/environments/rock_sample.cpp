#include <poweruct/environments/rock_sample.hpp>

#include <cmath>
#include <stdexcept>

namespace poweruct::envs {

RockSample::RockSample(int grid_size, int rock_count, Params params, std::uint64_t layout_seed)
    : grid_size_(grid_size), rock_count_(rock_count), params_(params) {
    if (grid_size < 2 || grid_size > 127) throw std::invalid_argument("rocksample grid size");
    if (rock_count < 1 || rock_count > 64) throw std::invalid_argument("rocksample rock count");
    if (rock_count > grid_size * grid_size)
        throw std::invalid_argument("more rocks than grid cells");

    // Canonical layout: distinct cells drawn from a seed derived from (n, k).
    std::uint64_t seed = layout_seed != 0
                             ? layout_seed
                             : derive_seed(0x526f636b53616d70ull, grid_size, rock_count);
    Rng rng(seed);
    std::vector<bool> used(grid_size * grid_size, false);
    rocks_.reserve(rock_count);
    while (static_cast<int>(rocks_.size()) < rock_count) {
        const int cell = static_cast<int>(rng.uniform_below(grid_size * grid_size));
        if (used[cell]) continue;
        used[cell] = true;
        rocks_.emplace_back(cell % grid_size, cell / grid_size);
    }
}

RockSample::State RockSample::initial_state(Rng& rng) const {
    State s;
    s.x = 0;
    s.y = static_cast<std::int8_t>(grid_size_ / 2);
    for (int i = 0; i < rock_count_; ++i)
        if (rng.bernoulli(params_.good_rock_prior)) s.rock_good |= (1ull << i);
    return s;
}

double RockSample::sensor_accuracy(const State& s, int rock) const {
    const double dx = s.x - rocks_[rock].first;
    const double dy = s.y - rocks_[rock].second;
    const double d = std::sqrt(dx * dx + dy * dy);
    return 0.5 + 0.5 * std::exp2(-d / params_.sensor_half_distance);
}

PomdpStep<RockSample::State> RockSample::sample(const State& s, int action, Rng& rng) const {
    if (s.done) throw std::logic_error("rocksample: step from terminal state");
    if (action < 0 || action >= action_count())
        throw std::invalid_argument("rocksample action out of range");

    State next = s;
    double reward = 0.0;
    int observation = kObsNone;

    if (action == kNorth) {
        if (next.y + 1 < grid_size_) next.y += 1;
    } else if (action == kSouth) {
        if (next.y > 0) next.y -= 1;
    } else if (action == kWest) {
        if (next.x > 0) next.x -= 1;
    } else if (action == kEast) {
        if (next.x + 1 < grid_size_) {
            next.x += 1;
        } else {
            next.done = true;
            reward = params_.exit_reward;
        }
    } else if (action == kSample) {
        // Sampling a good rock exhausts it; everything else is a bad sample.
        bool good = false;
        for (int i = 0; i < rock_count_; ++i) {
            if (rocks_[i].first == s.x && rocks_[i].second == s.y) {
                if (next.rock_good & (1ull << i)) {
                    good = true;
                    next.rock_good &= ~(1ull << i);
                }
                break;
            }
        }
        reward = good ? params_.good_sample_reward : params_.bad_sample_penalty;
    } else {
        const int rock = action - kSenseBase;
        const bool truth = (s.rock_good & (1ull << rock)) != 0;
        const bool correct = rng.bernoulli(sensor_accuracy(s, rock));
        observation = (truth == correct) ? kObsGood : kObsBad;
    }
    return {next, observation, reward, next.done};
}

void RockSample::perturb(State& s, Rng& rng) const {
    const int rock = static_cast<int>(rng.uniform_below(rock_count_));
    s.rock_good ^= (1ull << rock);
}

}  // namespace poweruct::envs
