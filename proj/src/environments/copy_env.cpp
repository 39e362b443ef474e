#include <poweruct/environments/copy_env.hpp>

#include <algorithm>
#include <stdexcept>

namespace poweruct::envs {

CopyEnv::CopyEnv(int alphabet_size, int tape_length, std::uint64_t tape_seed)
    : alphabet_(alphabet_size) {
    if (alphabet_size < 1 || alphabet_size > 255)
        throw std::invalid_argument("copy alphabet size out of range");
    if (tape_length < 1 || tape_length > 127)
        throw std::invalid_argument("copy tape length out of range");
    Rng rng(tape_seed);
    tape_.reserve(tape_length);
    for (int i = 0; i < tape_length; ++i)
        tape_.push_back(static_cast<std::uint8_t>(rng.uniform_below(alphabet_size)));
}

Transition<CopyEnv::State> CopyEnv::sample(const State& s, int action, Rng&) const {
    if (s.done) throw std::logic_error("copy env: step from terminal state");
    if (action < 0 || action >= action_count(s))
        throw std::invalid_argument("copy env action out of range");

    const bool move_right = (action & 1) != 0;
    const bool write = (action & 2) != 0;
    const int symbol = action >> 2;

    State next = s;
    double reward = 0.0;
    if (write) {
        if (symbol == tape_[next.written]) {
            reward = 1.0;
            next.written += 1;
            if (next.written == tape_.size()) next.done = true;
        } else {
            next.failed = true;
            next.done = true;
        }
    }
    const int last = tape_length() - 1;
    int cursor = static_cast<int>(next.cursor) + (move_right ? 1 : -1);
    next.cursor = static_cast<std::uint8_t>(std::clamp(cursor, 0, last));
    return {next, reward, next.done};
}

}  // namespace poweruct::envs
