#pragma once

#include <cstdint>
#include <vector>

#include <poweruct/rng.hpp>
#include <poweruct/tree_search_mdp.hpp>

namespace poweruct::envs {

struct CopyState {
    std::uint8_t cursor = 0;   // read position on the input tape
    std::uint8_t written = 0;  // symbols copied to the output so far
    bool failed = false;
    bool done = false;
};

/// Tape-copy task. Each action is a (move, write?, symbol) triple, so the
/// action space has 2 * 2 * alphabet entries. Writing the correct next symbol
/// pays 1; a wrong write ends the episode; copying the whole tape ends it
/// successfully. Undiscounted with horizon twice the tape length.
class CopyEnv {
public:
    using State = CopyState;

    CopyEnv(int alphabet_size, int tape_length, std::uint64_t tape_seed);

    int action_count(const State&) const { return 4 * alphabet_; }
    bool is_terminal(const State& s) const { return s.done; }
    std::uint64_t state_key(const State& s) const {
        return static_cast<std::uint64_t>(s.cursor) |
               (static_cast<std::uint64_t>(s.written) << 8) |
               (static_cast<std::uint64_t>(s.failed) << 16) |
               (static_cast<std::uint64_t>(s.done) << 17);
    }
    Transition<State> sample(const State& s, int action, Rng& rng) const;

    State initial_state() const { return State{}; }
    int alphabet_size() const { return alphabet_; }
    int tape_length() const { return static_cast<int>(tape_.size()); }
    int horizon() const { return 2 * tape_length(); }
    const std::vector<std::uint8_t>& tape() const { return tape_; }

    // Action layout: bit 0 move (0 left, 1 right), bit 1 write flag,
    // remaining bits the symbol index.
    static int encode_action(bool move_right, bool write, int symbol) {
        return (symbol << 2) | (static_cast<int>(write) << 1) | static_cast<int>(move_right);
    }

private:
    int alphabet_;
    std::vector<std::uint8_t> tape_;
};

}  // namespace poweruct::envs
