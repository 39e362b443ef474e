#include <poweruct/environments/pocman.hpp>

#include <poweruct/environments/frozen_lake.hpp>  // load_grid_file

#include <sstream>
#include <stdexcept>

namespace poweruct::envs {

namespace {
// N, S, E, W displacement; grid y grows downward.
constexpr int kDx[4] = {0, 0, 1, -1};
constexpr int kDy[4] = {-1, 1, 0, 0};
constexpr int kReverse[4] = {1, 0, 3, 2};
}  // namespace

const std::string& PocMan::default_maze() {
    static const std::string kMaze =
        "#################\n"
        "#o......#......o#\n"
        "#.##.##.#.##.##.#\n"
        "#.#...........#.#\n"
        "#.#.##.###.##.#.#\n"
        "#......#.#......#\n"
        "#.####.#.#.####.#\n"
        "#....#.....#....#\n"
        "####.#.###.#.####\n"
        "#......GGGG.....#\n"
        "####.#.###.#.####\n"
        "#....#.....#....#\n"
        "#.####.#.#.####.#\n"
        "#......#.#......#\n"
        "#.#.##.###.##.#.#\n"
        "#.#...........#.#\n"
        "#.##.##.#.##.##.#\n"
        "#o......P......o#\n"
        "#################\n";
    return kMaze;
}

PocMan::PocMan(const std::string& maze, Params params) : params_(params) {
    std::istringstream in(maze);
    std::string line;
    bool has_pac = false;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (width_ == 0)
            width_ = static_cast<int>(line.size());
        else if (static_cast<int>(line.size()) != width_)
            throw std::invalid_argument("pocman maze rows must have equal length");
        const int y = height_;
        for (int x = 0; x < width_; ++x) {
            const char c = line[x];
            switch (c) {
                case '#':
                    break;
                case '.':
                    food_cells_.emplace_back(x, y);
                    break;
                case 'o':
                    pill_cells_.emplace_back(x, y);
                    break;
                case 'G':
                    ghost_homes_.emplace_back(x, y);
                    break;
                case 'P':
                    pac_start_ = {x, y};
                    has_pac = true;
                    break;
                default:
                    throw std::invalid_argument("pocman maze has an unknown cell character");
            }
            if (c != '#') free_cells_.emplace_back(x, y);
            cells_.push_back(c);
        }
        ++height_;
    }
    if (!has_pac) throw std::invalid_argument("pocman maze needs a P cell");
    if (ghost_homes_.empty()) throw std::invalid_argument("pocman maze needs G cells");
    if (pill_cells_.size() > 8) throw std::invalid_argument("too many power pills");
    if (width_ * height_ > 512) throw std::invalid_argument("pocman maze too large");
}

PocMan PocMan::from_file(const std::string& path) { return from_file(path, Params()); }

PocMan PocMan::from_file(const std::string& path, Params params) {
    return PocMan(load_grid_file(path), params);
}

PocMan::State PocMan::initial_state(Rng& rng) const {
    State s;
    s.pac_x = static_cast<std::uint8_t>(pac_start_.first);
    s.pac_y = static_cast<std::uint8_t>(pac_start_.second);
    for (std::size_t i = 0; i < s.ghosts.size(); ++i) {
        const auto& home = ghost_homes_[i % ghost_homes_.size()];
        s.ghosts[i] = {static_cast<std::uint8_t>(home.first),
                       static_cast<std::uint8_t>(home.second), -1};
    }
    for (const auto& [x, y] : food_cells_)
        if (rng.bernoulli(params_.food_prob)) s.food.set(cell_index(x, y));
    s.pills_left = static_cast<std::uint8_t>((1u << pill_cells_.size()) - 1u);
    return s;
}

bool PocMan::move(int& x, int& y, int dir) const {
    const int nx = x + kDx[dir], ny = y + kDy[dir];
    if (!passable(nx, ny)) return false;
    x = nx;
    y = ny;
    return true;
}

int PocMan::food_along_ray(const State& s, int x, int y, int dir) const {
    int count = 0;
    int cx = x, cy = y;
    while (move(cx, cy, dir))
        if (s.food.test(cell_index(cx, cy))) ++count;
    return count;
}

int PocMan::ghost_direction(const State& s, const PocManState::Ghost& g, Rng& rng) const {
    std::vector<int> dirs;
    dirs.reserve(4);
    for (int d = 0; d < 4; ++d) {
        if (g.dir >= 0 && d == kReverse[g.dir]) continue;  // no reversing unless forced
        if (passable(g.x + kDx[d], g.y + kDy[d])) dirs.push_back(d);
    }
    if (dirs.empty()) return g.dir >= 0 ? kReverse[g.dir] : -1;

    if (s.step < params_.ghost_random_steps) return dirs[rng.uniform_below(dirs.size())];

    // Food seeking: directions with more pellets in line of sight are more likely.
    double total = 0.0;
    std::array<double, 4> weight{};
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        weight[i] = 1.0 + food_along_ray(s, g.x, g.y, dirs[i]);
        total += weight[i];
    }
    double u = rng.uniform01() * total;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        if (u < weight[i] || i + 1 == dirs.size()) return dirs[i];
        u -= weight[i];
    }
    return dirs.back();
}

int PocMan::observation(const State& s) const {
    int obs = 0;
    for (int d = 0; d < 4; ++d) {
        // Sight line: a ghost on the clear ray from the agent in direction d.
        int cx = s.pac_x, cy = s.pac_y;
        while (move(cx, cy, d)) {
            bool ghost_here = false;
            for (const auto& g : s.ghosts)
                if (g.x == cx && g.y == cy) ghost_here = true;
            if (ghost_here) {
                obs |= (1 << d);
                break;
            }
        }
        if (passable(s.pac_x + kDx[d], s.pac_y + kDy[d])) obs |= (1 << (4 + d));
    }
    for (int dy = -params_.smell_range; dy <= params_.smell_range; ++dy) {
        for (int dx = -params_.smell_range; dx <= params_.smell_range; ++dx) {
            if (std::abs(dx) + std::abs(dy) > params_.smell_range) continue;
            const int x = s.pac_x + dx, y = s.pac_y + dy;
            if (passable(x, y) && s.food.test(cell_index(x, y))) obs |= (1 << 8);
        }
    }
    if (s.pill_timer > 0) obs |= (1 << 9);
    return obs;
}

PomdpStep<PocMan::State> PocMan::sample(const State& s, int action, Rng& rng) const {
    if (s.done) throw std::logic_error("pocman: step from terminal state");
    if (action < 0 || action >= 4) throw std::invalid_argument("pocman action out of range");

    State next = s;
    if (next.pill_timer > 0) next.pill_timer -= 1;
    double reward = params_.step_reward;
    bool died = false;

    const std::uint8_t old_x = next.pac_x, old_y = next.pac_y;
    {
        int x = next.pac_x, y = next.pac_y;
        move(x, y, action);  // bumping a wall leaves the agent in place
        next.pac_x = static_cast<std::uint8_t>(x);
        next.pac_y = static_cast<std::uint8_t>(y);
    }

    auto resolve_contact = [&](PocManState::Ghost& g) {
        if (next.pill_timer > 0) {
            reward += params_.eat_ghost_reward;
            const auto& home = ghost_homes_[0];
            g.x = static_cast<std::uint8_t>(home.first);
            g.y = static_cast<std::uint8_t>(home.second);
            g.dir = -1;
        } else {
            died = true;
        }
    };

    for (auto& g : next.ghosts) {
        if (died) break;
        if (g.x == next.pac_x && g.y == next.pac_y) resolve_contact(g);
    }

    if (!died) {
        const int pac_cell = cell_index(next.pac_x, next.pac_y);
        if (next.food.test(pac_cell)) {
            next.food.reset(pac_cell);
            reward += params_.food_reward;
        }
        for (std::size_t i = 0; i < pill_cells_.size(); ++i) {
            if ((next.pills_left & (1u << i)) && pill_cells_[i].first == next.pac_x &&
                pill_cells_[i].second == next.pac_y) {
                next.pills_left &= static_cast<std::uint8_t>(~(1u << i));
                next.pill_timer = static_cast<std::uint8_t>(params_.pill_duration);
            }
        }

        for (auto& g : next.ghosts) {
            if (died) break;
            const std::uint8_t gx = g.x, gy = g.y;
            const int dir = ghost_direction(next, g, rng);
            if (dir >= 0) {
                int x = g.x, y = g.y;
                if (move(x, y, dir)) {
                    g.x = static_cast<std::uint8_t>(x);
                    g.y = static_cast<std::uint8_t>(y);
                    g.dir = static_cast<std::int8_t>(dir);
                }
            }
            const bool onto = (g.x == next.pac_x && g.y == next.pac_y);
            const bool swapped =
                (g.x == old_x && g.y == old_y && gx == next.pac_x && gy == next.pac_y);
            if (onto || swapped) resolve_contact(g);
        }
    }

    next.step += 1;
    if (died) {
        reward = params_.death_reward;
        next.done = true;
    } else if (next.food.none() && next.pills_left == 0) {
        next.done = true;  // level cleared
    }
    return {next, observation(next), reward, next.done};
}

void PocMan::perturb(State& s, Rng& rng) const {
    auto& g = s.ghosts[rng.uniform_below(s.ghosts.size())];
    const auto& cell = free_cells_[rng.uniform_below(free_cells_.size())];
    g.x = static_cast<std::uint8_t>(cell.first);
    g.y = static_cast<std::uint8_t>(cell.second);
    g.dir = -1;
}

}  // namespace poweruct::envs
