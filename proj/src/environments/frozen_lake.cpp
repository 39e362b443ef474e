#include <poweruct/environments/frozen_lake.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace poweruct::envs {

const std::string& FrozenLake::default_map() {
    static const std::string kMap =
        "SFFFFFFF\n"
        "FFFFFFFF\n"
        "FFFHFFFF\n"
        "FFFFFHFF\n"
        "FFFHFFFF\n"
        "FHHFFFHF\n"
        "FHFFHFHF\n"
        "FFFHFFFG\n";
    return kMap;
}

FrozenLake::FrozenLake(const std::string& grid, bool slippery) : slippery_(slippery) {
    std::istringstream in(grid);
    std::string line;
    bool has_start = false, has_goal = false;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (width_ == 0)
            width_ = static_cast<int>(line.size());
        else if (static_cast<int>(line.size()) != width_)
            throw std::invalid_argument("frozen lake map rows must have equal length");
        for (char c : line) {
            if (c == 'S') {
                if (has_start) throw std::invalid_argument("frozen lake map needs exactly one S");
                has_start = true;
                start_cell_ = static_cast<std::uint8_t>(cells_.size());
            } else if (c == 'G') {
                has_goal = true;
            } else if (c != 'F' && c != 'H') {
                throw std::invalid_argument("frozen lake map has an unknown cell character");
            }
            cells_.push_back(c);
        }
        ++height_;
    }
    if (!has_start || !has_goal)
        throw std::invalid_argument("frozen lake map needs an S and a G cell");
    if (width_ * height_ > 255)
        throw std::invalid_argument("frozen lake map too large for 8-bit cells");
}

FrozenLake FrozenLake::from_file(const std::string& path, bool slippery) {
    return FrozenLake(load_grid_file(path), slippery);
}

std::uint8_t FrozenLake::move(std::uint8_t cell, int direction) const {
    int x = cell % width_;
    int y = cell / width_;
    switch (direction) {
        case kLeft:
            if (x > 0) --x;
            break;
        case kDown:
            if (y < height_ - 1) ++y;
            break;
        case kRight:
            if (x < width_ - 1) ++x;
            break;
        case kUp:
            if (y > 0) --y;
            break;
        default:
            throw std::invalid_argument("frozen lake action out of range");
    }
    return static_cast<std::uint8_t>(y * width_ + x);
}

Transition<FrozenLake::State> FrozenLake::sample(const State& s, int action, Rng& rng) const {
    if (s.done) throw std::logic_error("frozen lake: step from terminal state");
    int direction = action;
    if (slippery_) {
        // Intended direction and the two tangential ones, 1/3 each.
        const int offsets[3] = {3, 0, 1};
        direction = (action + offsets[rng.uniform_below(3)]) % 4;
    }
    const std::uint8_t next = move(s.cell, direction);
    const char c = cells_[next];
    if (c == 'G') return {State{next, true}, 1.0, true};
    if (c == 'H') return {State{next, true}, 0.0, true};
    return {State{next, false}, 0.0, false};
}

int FrozenLake::rollout_action(const State& s, Rng& rng) const {
    int hole_count[4];
    int best = 4;  // fewest holes among an action's three slip outcomes
    for (int a = 0; a < 4; ++a) {
        hole_count[a] = 0;
        for (int off : {3, 0, 1})
            if (cells_[move(s.cell, (a + off) % 4)] == 'H') ++hole_count[a];
        best = std::min(best, hole_count[a]);
    }
    int candidates[4];
    int count = 0;
    for (int a = 0; a < 4; ++a)
        if (hole_count[a] == best) candidates[count++] = a;
    return count == 1 ? candidates[0]
                      : candidates[rng.uniform_below(static_cast<std::uint64_t>(count))];
}

std::string load_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string load_bundled_grid(const std::string& filename, const std::string& explicit_path) {
    if (!explicit_path.empty()) return load_grid_file(explicit_path);
    if (const char* dir = std::getenv("POWERUCT_DATA_DIR"))
        return load_grid_file(std::string(dir) + "/" + filename);
#ifdef POWERUCT_DATA_DIR
    return load_grid_file(std::string(POWERUCT_DATA_DIR) + "/" + filename);
#else
    throw std::runtime_error("no data directory configured for " + filename);
#endif
}

}  // namespace poweruct::envs
