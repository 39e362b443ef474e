#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <poweruct/power_mean.hpp>
#include <poweruct/rng.hpp>
#include <poweruct/tree_search_mdp.hpp>

namespace poweruct {

template <class S>
struct PomdpStep {
    S next_state;
    int observation;  // drawn from a finite set
    double reward;    // raw reward scale
    bool terminal;
};

/// Black-box simulator contract for history-based planning. Rewards are raw;
/// the planner maps them into [0, 1] via the declared bounds.
template <class M>
concept PomdpModel = requires(const M& m, const typename M::State& s, int a, Rng& rng) {
    { m.action_count() } -> std::convertible_to<int>;
    { m.is_terminal(s) } -> std::convertible_to<bool>;
    { m.sample(s, a, rng) } -> std::convertible_to<PomdpStep<typename M::State>>;
    { m.initial_state(rng) } -> std::convertible_to<typename M::State>;
    { m.reward_min() } -> std::convertible_to<double>;
    { m.reward_max() } -> std::convertible_to<double>;
};

/// Optional domain hook for particle reinvigoration.
template <class M>
concept PomdpModelWithPerturb =
    PomdpModel<M> && requires(const M& m, typename M::State& s, Rng& rng) {
        { m.perturb(s, rng) };
    };

inline double scale_reward(double r, double r_min, double r_max) {
    if (!(r_min < r_max)) throw std::invalid_argument("reward bounds require r_min < r_max");
    return std::clamp((r - r_min) / (r_max - r_min), 0.0, 1.0);
}

template <class S>
struct HistoryActionNode;

/// Node for one action-observation history. The (action, observation) path is
/// the node's identity; it is carried by the tree structure rather than
/// stored, so path uniqueness holds by construction.
template <class S>
struct HistoryNode {
    std::int64_t visit_count = 0;  // N(h)
    double value = 0.0;            // V(h)
    bool leaf_init = false;
    std::vector<S> belief;  // particles, maintained at root candidates
    std::vector<std::unique_ptr<HistoryActionNode<S>>> children;  // indexed by action
};

template <class S>
struct HistoryActionNode {
    std::int64_t visit_count = 0;  // n(h,a)
    double value = 0.0;            // Q(h,a)
    double reward_sum = 0.0;       // scaled immediate rewards through (h,a)
    std::unordered_map<int, std::unique_ptr<HistoryNode<S>>> children;  // by observation
};

/// POMCP with the same selection, expansion and value machinery as the MDP
/// planner, applied to history nodes with particle beliefs. Single-owner
/// mutable state; parallelize across episodes only.
template <PomdpModel M>
class PomdpPlanner {
public:
    using State = typename M::State;
    using Node = HistoryNode<State>;
    using ActionNodeT = HistoryActionNode<State>;

    PomdpPlanner(const M& model, SearchConfig config, std::int64_t belief_capacity = 0)
        : model_(model), config_(config), rng_(config.rng_seed) {
        config_.validate();
        if (!(model_.reward_min() < model_.reward_max()))
            throw std::invalid_argument("reward bounds require r_min < r_max");
        capacity_ = belief_capacity > 0 ? belief_capacity : config_.simulations_per_move;
        cutoff_depth_ = detail::rollout_cutoff_depth(config_.gamma, config_.rollout_cutoff_eps,
                                                     config_.max_depth);
        reset_root();
    }

    /// Fresh root whose belief is drawn from the model's initial-state prior.
    void reset_root() {
        root_ = std::make_unique<Node>();
        root_->belief.reserve(capacity_);
        for (std::int64_t i = 0; i < capacity_; ++i)
            root_->belief.push_back(model_.initial_state(rng_));
    }

    void set_root_belief(std::vector<State> particles) {
        root_ = std::make_unique<Node>();
        root_->belief = std::move(particles);
    }

    /// Each simulation draws a hidden state uniformly from the root particles
    /// and descends exactly as the MDP search does over history nodes.
    /// Returns argmax_a Q(root, a), ties broken uniformly at random.
    int plan() {
        if (!root_ || root_->belief.empty()) throw std::runtime_error("belief collapsed");
        for (std::int64_t i = 0; i < config_.simulations_per_move; ++i) {
            State state = rng_.pick(root_->belief);
            simulate_v(*root_, state, 0);
        }
        const int actions = model_.action_count();
        std::vector<int> best;
        double best_q = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < actions; ++a) {
            const ActionNodeT* child = (a < static_cast<int>(root_->children.size()))
                                           ? root_->children[a].get()
                                           : nullptr;
            const double q = child ? child->value : 0.0;
            if (q > best_q) {
                best_q = q;
                best.clear();
                best.push_back(a);
            } else if (q == best_q) {
                best.push_back(a);
            }
        }
        return rng_.pick(best);
    }

    /// Root update after executing `action` and observing `observation` in
    /// the real environment: keeps the matching child, refills its belief by
    /// rejection filtering from the old root, reinvigorates if depleted.
    void advance(int action, int observation) {
        if (!root_) throw std::runtime_error("belief collapsed");
        std::unique_ptr<Node> next;
        if (action < static_cast<int>(root_->children.size()) && root_->children[action]) {
            auto& successors = root_->children[action]->children;
            if (auto it = successors.find(observation); it != successors.end())
                next = std::move(it->second);
        }
        if (!next) next = std::make_unique<Node>();
        next->belief.reserve(capacity_);

        const std::int64_t attempt_budget =
            std::max<std::int64_t>(1024, rejection_attempts_per_particle_ * capacity_);
        std::int64_t attempts = 0;
        while (static_cast<std::int64_t>(next->belief.size()) < capacity_ &&
               attempts < attempt_budget && !root_->belief.empty()) {
            ++attempts;
            State particle = rng_.pick(root_->belief);
            PomdpStep<State> step = model_.sample(particle, action, rng_);
            if (!step.terminal && step.observation == observation)
                next->belief.push_back(std::move(step.next_state));
        }
        if (static_cast<std::int64_t>(next->belief.size()) < capacity_ &&
            !next->belief.empty()) {
            if constexpr (PomdpModelWithPerturb<M>) {
                // Up to 10% of capacity from perturbed copies of survivors.
                const std::int64_t target = std::min(
                    capacity_, static_cast<std::int64_t>(next->belief.size()) + capacity_ / 10);
                while (static_cast<std::int64_t>(next->belief.size()) < target) {
                    State clone = rng_.pick(next->belief);
                    model_.perturb(clone, rng_);
                    next->belief.push_back(std::move(clone));
                }
            }
        }
        if (next->belief.empty()) throw std::runtime_error("particle deprivation");
        root_ = std::move(next);
    }

    const Node* root() const { return root_.get(); }
    Rng& rng() { return rng_; }
    std::int64_t belief_capacity() const { return capacity_; }

    /// Random-policy scaled-return estimate from `state`; see the MDP planner.
    double rollout(State state, int depth) { return rollout_impl(std::move(state), depth); }

private:
    double scaled(double raw) const {
        return scale_reward(raw, model_.reward_min(), model_.reward_max());
    }

    int select_action(Node& node) {
        const int actions = model_.action_count();
        if (static_cast<int>(node.children.size()) < actions) node.children.resize(actions);

        if (config_.backup_kind == BackupKind::ments_softmax) return select_ments(node, actions);

        scratch_candidates_.clear();
        for (int a = 0; a < actions; ++a)
            if (!node.children[a] || node.children[a]->visit_count == 0)
                scratch_candidates_.push_back(a);
        if (!scratch_candidates_.empty()) return rng_.pick(scratch_candidates_);

        const double log_n = std::log(static_cast<double>(node.visit_count));
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < actions; ++a) {
            const auto& child = *node.children[a];
            const double score =
                child.value +
                config_.exploration_c *
                    std::sqrt(log_n / static_cast<double>(child.visit_count));
            if (score > best) {
                best = score;
                scratch_candidates_.clear();
                scratch_candidates_.push_back(a);
            } else if (score == best) {
                scratch_candidates_.push_back(a);
            }
        }
        return rng_.pick(scratch_candidates_);
    }

    int select_ments(Node& node, int actions) {
        const double tau = config_.ments_temperature;
        scratch_values_.clear();
        for (int a = 0; a < actions; ++a)
            scratch_values_.push_back(node.children[a] ? node.children[a]->value : 0.0);
        double qmax = scratch_values_[0];
        for (double v : scratch_values_) qmax = std::max(qmax, v);
        double z = 0.0;
        scratch_weights_.clear();
        for (double v : scratch_values_) {
            const double e = std::exp((v - qmax) / tau);
            scratch_weights_.push_back(e);
            z += e;
        }
        const double lambda =
            std::min(1.0, config_.ments_exploration * actions /
                              std::log(static_cast<double>(node.visit_count) + 2.0));
        double u = rng_.uniform01();
        for (int a = 0; a < actions; ++a) {
            const double prob = (1.0 - lambda) * scratch_weights_[a] / z + lambda / actions;
            if (u < prob || a == actions - 1) return a;
            u -= prob;
        }
        return actions - 1;
    }

    void backup_v(Node& node) {
        if (config_.backup_kind == BackupKind::ments_softmax) {
            scratch_values_.clear();
            for (const auto& child : node.children)
                scratch_values_.push_back(child ? child->value : 0.0);
            node.value = detail::ments_soft_value(scratch_values_, config_.ments_temperature);
            return;
        }
        scratch_values_.clear();
        scratch_weights_.clear();
        for (const auto& child : node.children) {
            if (child && child->visit_count > 0) {
                scratch_values_.push_back(child->value);
                scratch_weights_.push_back(static_cast<double>(child->visit_count));
            }
        }
        if (scratch_values_.empty()) return;
        switch (config_.backup_kind) {
            case BackupKind::power_mean:
                node.value = power_mean(scratch_values_, scratch_weights_, config_.order);
                break;
            case BackupKind::average_reference:
                node.value = weighted_average(scratch_values_, scratch_weights_);
                break;
            case BackupKind::max_reference: {
                double best = scratch_values_[0];
                for (double v : scratch_values_) best = std::max(best, v);
                node.value = best;
                break;
            }
            default:
                break;
        }
    }

    void simulate_v(Node& node, const State& state, int depth) {
        const int action = select_action(node);
        if (!node.children[action]) node.children[action] = std::make_unique<ActionNodeT>();
        simulate_q(*node.children[action], state, action, depth);
        if (node.leaf_init) {
            std::int64_t total = 0;
            for (const auto& child : node.children)
                if (child) total += child->visit_count;
            node.visit_count = total;
            node.leaf_init = false;
        } else {
            node.visit_count += 1;
        }
        backup_v(node);
    }

    void simulate_q(ActionNodeT& node, const State& state, int action, int depth) {
        PomdpStep<State> step = model_.sample(state, action, rng_);
        node.reward_sum += scaled(step.reward);
        if (!step.terminal && depth + 1 < config_.max_depth) {
            auto it = node.children.find(step.observation);
            Node* child_node = nullptr;
            if (it == node.children.end()) {
                auto child = std::make_unique<Node>();
                child->leaf_init = true;
                child->visit_count = 1;
                child->value = rollout_impl(step.next_state, depth);
                child_node = child.get();
                node.children.emplace(step.observation, std::move(child));
            } else {
                child_node = it->second.get();
                simulate_v(*child_node, step.next_state, depth + 1);
            }
            // Candidate next roots collect the states that reached them.
            if (depth == 0 && static_cast<std::int64_t>(child_node->belief.size()) < capacity_)
                child_node->belief.push_back(step.next_state);
        }
        node.visit_count += 1;
        double successor_value = 0.0;
        for (const auto& [obs, child] : node.children)
            successor_value += static_cast<double>(child->visit_count) * child->value;
        node.value = (node.reward_sum + config_.gamma * successor_value) /
                     static_cast<double>(node.visit_count);
    }

    double rollout_impl(State state, int depth) {
        double ret = 0.0, discount = 1.0;
        for (int d = depth; d < cutoff_depth_; ++d) {
            if (model_.is_terminal(state)) break;
            const int action = static_cast<int>(rng_.uniform_below(model_.action_count()));
            PomdpStep<State> step = model_.sample(state, action, rng_);
            ret += discount * scaled(step.reward);
            discount *= config_.gamma;
            if (step.terminal) break;
            state = std::move(step.next_state);
        }
        return ret;
    }

    const M& model_;
    SearchConfig config_;
    Rng rng_;
    std::int64_t capacity_ = 0;
    int cutoff_depth_ = 0;
    std::int64_t rejection_attempts_per_particle_ = 16;
    std::unique_ptr<Node> root_;
    std::vector<int> scratch_candidates_;
    std::vector<double> scratch_values_;
    std::vector<double> scratch_weights_;
};

}  // namespace poweruct
