#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <string>
#include <vector>

#include <poweruct/rng.hpp>
#include <poweruct/tree_search_pomdp.hpp>

namespace poweruct::envs {

struct PocManState {
    struct Ghost {
        std::uint8_t x = 0, y = 0;
        std::int8_t dir = -1;  // last move direction, -1 before the first move
    };

    std::uint8_t pac_x = 0, pac_y = 0;
    std::array<Ghost, 4> ghosts;
    std::bitset<512> food;       // indexed by y * width + x
    std::uint8_t pills_left = 0;  // bitmask over the fixed pill cells
    std::uint8_t pill_timer = 0;  // in [0, 15]
    std::uint16_t step = 0;
    bool done = false;
};

/// Partially observable Pac-Man on a 17x19 maze. The agent only perceives a
/// 10-bit local percept: ghost sight lines (4), passable neighbors (4), food
/// smell (1) and the power-pill state (1), giving 1024 observations. Rewards:
/// -1 per step, +10 per food pellet, +25 per eaten ghost, -100 for dying.
/// Ghosts move randomly at first and then favor food-rich directions.
class PocMan {
public:
    using State = PocManState;

    enum Action { kNorth = 0, kSouth = 1, kEast = 2, kWest = 3 };

    struct Params {
        double food_prob = 0.5;      // food pellet probability per free cell
        int smell_range = 1;         // Manhattan radius of the food-smell bit
        int ghost_random_steps = 20; // steps before ghosts switch to food seeking
        int pill_duration = 15;
        double step_reward = -1.0;
        double food_reward = 10.0;
        double eat_ghost_reward = 25.0;
        double death_reward = -100.0;
    };

    static constexpr int kDefaultHorizon = 1000;

    PocMan() : PocMan(default_maze(), Params()) {}
    explicit PocMan(const std::string& maze) : PocMan(maze, Params()) {}
    PocMan(const std::string& maze, Params params);
    static const std::string& default_maze();
    static PocMan from_file(const std::string& path);
    static PocMan from_file(const std::string& path, Params params);

    int action_count() const { return 4; }
    bool is_terminal(const State& s) const { return s.done; }
    PomdpStep<State> sample(const State& s, int action, Rng& rng) const;
    State initial_state(Rng& rng) const;
    double reward_min() const { return params_.death_reward; }
    double reward_max() const { return params_.eat_ghost_reward; }

    /// Reinvigoration hook: moves one random ghost to a random free cell.
    void perturb(State& s, Rng& rng) const;

    int width() const { return width_; }
    int height() const { return height_; }
    bool passable(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_ && cells_[y * width_ + x] != '#';
    }
    int free_cell_count() const { return static_cast<int>(free_cells_.size()); }
    int observation(const State& s) const;  // the 10-bit percept of `s`

private:
    int cell_index(int x, int y) const { return y * width_ + x; }
    bool move(int& x, int& y, int dir) const;
    int ghost_direction(const State& s, const PocManState::Ghost& g, Rng& rng) const;
    int food_along_ray(const State& s, int x, int y, int dir) const;

    std::string cells_;
    int width_ = 0;
    int height_ = 0;
    Params params_;
    std::pair<int, int> pac_start_;
    std::vector<std::pair<int, int>> ghost_homes_;
    std::vector<std::pair<int, int>> pill_cells_;
    std::vector<std::pair<int, int>> free_cells_;  // every passable cell
    std::vector<std::pair<int, int>> food_cells_;  // '.' cells, food candidates
};

}  // namespace poweruct::envs
