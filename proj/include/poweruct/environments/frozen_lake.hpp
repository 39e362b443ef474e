#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <poweruct/rng.hpp>
#include <poweruct/tree_search_mdp.hpp>

namespace poweruct::envs {

struct FrozenLakeState {
    std::uint8_t cell = 0;
    bool done = false;
};

/// Slippery ice grid-world. The agent moves in the intended direction one
/// third of the time and into each tangential direction otherwise. Reaching
/// the goal yields reward 1; holes and the time limit yield 0. Holes and the
/// goal are absorbing.
class FrozenLake {
public:
    using State = FrozenLakeState;

    enum Action { kLeft = 0, kDown = 1, kRight = 2, kUp = 3 };

    static constexpr int kDefaultHorizon = 200;

    /// `grid` is a row-major character map: S start, F frozen, H hole, G goal.
    /// Rows are newline separated; all rows must have equal length.
    explicit FrozenLake(const std::string& grid = default_map(), bool slippery = true);

    static const std::string& default_map();  // the standard 8x8 layout
    static FrozenLake from_file(const std::string& path, bool slippery = true);

    int action_count(const State&) const { return 4; }
    bool is_terminal(const State& s) const { return s.done; }
    std::uint64_t state_key(const State& s) const {
        return static_cast<std::uint64_t>(s.cell) | (static_cast<std::uint64_t>(s.done) << 8);
    }
    Transition<State> sample(const State& s, int action, Rng& rng) const;

    State initial_state() const { return State{start_cell_, false}; }

    /// Heuristic rollout policy: a uniform draw over actions whose slip
    /// outcomes cannot land in a hole, falling back to fewest-hole actions.
    int rollout_action(const State& s, Rng& rng) const;
    int width() const { return width_; }
    int height() const { return height_; }
    char cell_char(int cell) const { return cells_[cell]; }

private:
    std::uint8_t move(std::uint8_t cell, int direction) const;

    std::string cells_;  // flattened map characters
    int width_ = 0;
    int height_ = 0;
    std::uint8_t start_cell_ = 0;
    bool slippery_ = true;
};

/// Reads a whitespace-trimmed grid file (plain text, one row per line).
std::string load_grid_file(const std::string& path);

/// Resolves a bundled layout: explicit path if non-empty, else the
/// POWERUCT_DATA_DIR environment variable, else the compiled-in data
/// directory. Returns the file content.
std::string load_bundled_grid(const std::string& filename, const std::string& explicit_path = {});

}  // namespace poweruct::envs
