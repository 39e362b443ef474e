#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <poweruct/rng.hpp>
#include <poweruct/tree_search_mdp.hpp>

namespace poweruct::envs {

/// Complete tree of fixed depth and branching factor with Bernoulli payoffs
/// on the transitions into the leaves and zero reward elsewhere. Used by the
/// estimator-bias checks, where the optimal root value is known exactly.
class BernoulliTree {
public:
    struct State {
        std::uint32_t node = 0;  // heap numbering: children of v are v*B+1 .. v*B+B
        std::uint8_t depth = 0;
    };

    BernoulliTree(int depth, int branching, std::vector<double> leaf_means)
        : depth_(depth), branching_(branching), leaf_means_(std::move(leaf_means)) {
        if (depth < 1 || branching < 1) throw std::invalid_argument("bad tree shape");
        std::size_t leaves = 1;
        internal_count_ = 0;
        for (int d = 0; d < depth; ++d) {
            internal_count_ += leaves;
            leaves *= branching;
        }
        if (leaf_means_.size() != leaves)
            throw std::invalid_argument("leaf mean count does not match tree shape");
        for (double m : leaf_means_)
            if (m < 0.0 || m > 1.0) throw std::invalid_argument("leaf means must be in [0,1]");
    }

    int action_count(const State&) const { return branching_; }
    bool is_terminal(const State& s) const { return s.depth >= depth_; }
    std::uint64_t state_key(const State& s) const { return s.node; }

    Transition<State> sample(const State& s, int action, Rng& rng) const {
        const std::uint32_t child = s.node * branching_ + action + 1;
        const State next{child, static_cast<std::uint8_t>(s.depth + 1)};
        if (next.depth == depth_) {
            const std::size_t leaf = child - internal_count_;
            return {next, rng.bernoulli(leaf_means_[leaf]) ? 1.0 : 0.0, true};
        }
        return {next, 0.0, false};
    }

    State initial_state() const { return State{}; }
    int depth() const { return depth_; }
    int branching() const { return branching_; }
    const std::vector<double>& leaf_means() const { return leaf_means_; }

private:
    int depth_;
    int branching_;
    std::size_t internal_count_;
    std::vector<double> leaf_means_;
};

}  // namespace poweruct::envs
