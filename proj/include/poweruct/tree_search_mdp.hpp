#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <poweruct/power_mean.hpp>
#include <poweruct/rng.hpp>

namespace poweruct {

template <class S>
struct Transition {
    S next_state;
    double reward;  // already scaled to [0, 1]
    bool terminal;
};

/// Black-box simulator contract for fully observable planning.
template <class M>
concept GenerativeModel = requires(const M& m, const typename M::State& s, int a, Rng& rng) {
    { m.action_count(s) } -> std::convertible_to<int>;
    { m.is_terminal(s) } -> std::convertible_to<bool>;
    { m.state_key(s) } -> std::convertible_to<std::uint64_t>;
    { m.sample(s, a, rng) } -> std::convertible_to<Transition<typename M::State>>;
};

/// Optional domain rollout policy, consulted only when the search config asks
/// for heuristic rollouts.
template <class M>
concept GenerativeModelWithRolloutPolicy =
    GenerativeModel<M> && requires(const M& m, const typename M::State& s, Rng& rng) {
        { m.rollout_action(s, rng) } -> std::convertible_to<int>;
    };

/// How state-node values are recomputed from child statistics. The reference
/// routes implement the plain average and max backups independently of the
/// power-mean path so the two can be compared bit for bit.
enum class BackupKind {
    power_mean,
    average_reference,
    max_reference,
    ments_softmax,
};

struct SearchConfig {
    PowerOrder order = PowerOrder::finite(1.0);
    double exploration_c = std::numbers::sqrt2;
    double gamma = 1.0;                 // in (0, 1]
    double rollout_cutoff_eps = 0.01;   // rollout stops once gamma^depth < eps
    std::int64_t simulations_per_move = 1000;
    BackupKind backup_kind = BackupKind::power_mean;
    double ments_temperature = 0.1;
    double ments_exploration = 1.0;
    std::uint64_t rng_seed = 0;
    int max_depth = 200;                // absolute simulation depth cap (env horizon)
    bool reuse_tree = true;
    // Rollouts are uniformly random by default; a model-provided rollout
    // policy is used only when this flag is set.
    bool heuristic_rollouts = false;

    void validate() const {
        if (simulations_per_move < 1)
            throw std::invalid_argument("simulations_per_move must be >= 1");
        if (!(gamma > 0.0) || gamma > 1.0)
            throw std::invalid_argument("gamma must be in (0, 1]");
        if (!(rollout_cutoff_eps > 0.0))
            throw std::invalid_argument("rollout_cutoff_eps must be > 0");
        if (backup_kind == BackupKind::ments_softmax && !(ments_temperature > 0.0))
            throw std::invalid_argument("ments temperature must be > 0");
        if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    }
};

struct ActionNode;

struct StateNode {
    std::int64_t visit_count = 0;  // N(s)
    double value = 0.0;            // V(s)
    // True while the node only carries its creation rollout estimate. The
    // first simulation through it replaces that estimate with child
    // statistics, after which N(s) == sum_a n(s,a) holds.
    bool leaf_init = false;
    std::vector<std::unique_ptr<ActionNode>> children;  // indexed by action
};

struct ActionNode {
    std::int64_t visit_count = 0;  // n(s,a)
    double value = 0.0;            // Q(s,a)
    double reward_sum = 0.0;       // sum of immediate rewards seen through (s,a)
    std::unordered_map<std::uint64_t, std::unique_ptr<StateNode>> children;  // by successor key
};

namespace detail {

// Smallest depth d with gamma^d < eps; simulations never exceed max_depth.
inline int rollout_cutoff_depth(double gamma, double eps, int max_depth) {
    if (gamma >= 1.0) return max_depth;
    int d = 0;
    while (d < max_depth && !(std::pow(gamma, d) < eps)) ++d;
    return d;
}

inline double ments_soft_value(const std::vector<double>& q, double tau) {
    double qmax = q[0];
    for (double v : q) qmax = std::max(qmax, v);
    double sum = 0.0;
    for (double v : q) sum += std::exp((v - qmax) / tau);
    return qmax + tau * std::log(sum);
}

}  // namespace detail

/// One search tree over a generative model. Single-owner mutable state: one
/// planner per thread; scale across episodes, not within a tree.
template <GenerativeModel M>
class MdpPlanner {
public:
    using State = typename M::State;

    MdpPlanner(const M& model, SearchConfig config)
        : model_(model), config_(config), rng_(config.rng_seed) {
        config_.validate();
        cutoff_depth_ = detail::rollout_cutoff_depth(config_.gamma, config_.rollout_cutoff_eps,
                                                     config_.max_depth);
    }

    /// Runs simulations_per_move simulations from `root_state` and returns
    /// argmax_a Q(root, a) with uniform random tie-breaking.
    int plan(const State& root_state) {
        if (model_.is_terminal(root_state)) throw std::invalid_argument("no action available");
        const std::uint64_t key = model_.state_key(root_state);
        if (!root_ || !config_.reuse_tree || key != root_key_) {
            root_ = std::make_unique<StateNode>();
            root_key_ = key;
        }
        for (std::int64_t i = 0; i < config_.simulations_per_move; ++i)
            simulate_v(*root_, root_state, 0);
        return greedy_action(root_state);
    }

    /// Picks argmax_a Q at the current root without running simulations; used
    /// by plan-once execution. Falls back to a uniform action off-tree.
    int greedy_action(const State& state) {
        const int actions = model_.action_count(state);
        if (!root_ || model_.state_key(state) != root_key_)
            return static_cast<int>(rng_.uniform_below(actions));
        std::vector<int> best;
        double best_q = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < actions; ++a) {
            const ActionNode* child =
                (a < static_cast<int>(root_->children.size())) ? root_->children[a].get()
                                                               : nullptr;
            const double q = child ? child->value : 0.0;  // unvisited default
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

    /// Moves the root to the subtree under (action, realized successor);
    /// everything else is discarded.
    void advance(int action, const State& next_state) {
        const std::uint64_t key = model_.state_key(next_state);
        std::unique_ptr<StateNode> next_root;
        if (root_ && config_.reuse_tree && action < static_cast<int>(root_->children.size()) &&
            root_->children[action]) {
            auto& successors = root_->children[action]->children;
            if (auto it = successors.find(key); it != successors.end())
                next_root = std::move(it->second);
        }
        root_ = std::move(next_root);
        root_key_ = key;
    }

    const StateNode* root() const { return root_.get(); }
    Rng& rng() { return rng_; }

    /// Random-policy return estimate from `state`, truncated once
    /// gamma^depth < eps (or at the depth cap). Draws from the planner's
    /// stream; primarily for tests and diagnostics.
    double rollout(State state, int depth) { return rollout_impl(std::move(state), depth); }

private:
    int select_action(StateNode& node, const State& state) {
        const int actions = model_.action_count(state);
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
            const ActionNode& child = *node.children[a];
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

    // E2W-style sampling: soft-indmax of current Q mixed with a uniform whose
    // weight decays as the node is visited.
    int select_ments(StateNode& node, int actions) {
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
            const double prob =
                (1.0 - lambda) * scratch_weights_[a] / z + lambda / actions;
            if (u < prob || a == actions - 1) return a;
            u -= prob;
        }
        return actions - 1;
    }

    void backup_v(StateNode& node) {
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

    void simulate_v(StateNode& node, const State& state, int depth) {
        const int action = select_action(node, state);
        if (!node.children[action]) node.children[action] = std::make_unique<ActionNode>();
        simulate_q(*node.children[action], state, action, depth);
        if (node.leaf_init) {
            // The creation rollout is superseded by child statistics.
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

    void simulate_q(ActionNode& node, const State& state, int action, int depth) {
        const Transition<State> tr = model_.sample(state, action, rng_);
        node.reward_sum += tr.reward;
        if (!tr.terminal && depth + 1 < config_.max_depth) {
            const std::uint64_t key = model_.state_key(tr.next_state);
            auto it = node.children.find(key);
            if (it == node.children.end()) {
                // First visit: store the rollout estimate on the fresh child so
                // the update below sees it through N(s') V(s').
                auto child = std::make_unique<StateNode>();
                child->leaf_init = true;
                child->visit_count = 1;
                child->value = rollout_impl(tr.next_state, depth);
                node.children.emplace(key, std::move(child));
            } else {
                simulate_v(*it->second, tr.next_state, depth + 1);
            }
        }
        node.visit_count += 1;
        double successor_value = 0.0;
        for (const auto& [key, child] : node.children)
            successor_value += static_cast<double>(child->visit_count) * child->value;
        node.value = (node.reward_sum + config_.gamma * successor_value) /
                     static_cast<double>(node.visit_count);
    }

    double rollout_impl(State state, int depth) {
        double ret = 0.0, discount = 1.0;
        for (int d = depth; d < cutoff_depth_; ++d) {
            if (model_.is_terminal(state)) break;
            int action;
            if constexpr (GenerativeModelWithRolloutPolicy<M>) {
                action = config_.heuristic_rollouts
                             ? model_.rollout_action(state, rng_)
                             : static_cast<int>(rng_.uniform_below(model_.action_count(state)));
            } else {
                action = static_cast<int>(rng_.uniform_below(model_.action_count(state)));
            }
            Transition<State> tr = model_.sample(state, action, rng_);
            ret += discount * tr.reward;
            discount *= config_.gamma;
            if (tr.terminal) break;
            state = std::move(tr.next_state);
        }
        return ret;
    }

    const M& model_;
    SearchConfig config_;
    Rng rng_;
    int cutoff_depth_ = 0;
    std::unique_ptr<StateNode> root_;
    std::uint64_t root_key_ = 0;
    std::vector<int> scratch_candidates_;
    std::vector<double> scratch_values_;
    std::vector<double> scratch_weights_;
};

}  // namespace poweruct
