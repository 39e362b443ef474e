#include <doctest.h>

#include <cmath>
#include <vector>

#include <poweruct/environments/frozen_lake.hpp>
#include <poweruct/environments/rock_sample.hpp>
#include <poweruct/tree_search_mdp.hpp>
#include <poweruct/tree_search_pomdp.hpp>

using namespace poweruct;

namespace {

// Fully observable wrapper: the observation is the state key, rewards are
// already in [0, 1].
struct FrozenLakePomdp {
    const envs::FrozenLake* env;
    using State = envs::FrozenLake::State;

    int action_count() const { return 4; }
    bool is_terminal(const State& s) const { return env->is_terminal(s); }
    PomdpStep<State> sample(const State& s, int a, Rng& rng) const {
        const Transition<State> tr = env->sample(s, a, rng);
        return {tr.next_state, static_cast<int>(env->state_key(tr.next_state)), tr.reward,
                tr.terminal};
    }
    State initial_state(Rng&) const { return env->initial_state(); }
    double reward_min() const { return 0.0; }
    double reward_max() const { return 1.0; }
};

// Compares an MDP search tree with a history search tree node by node; for a
// fully observable model the two are isomorphic with observation == state key.
template <class S>
bool trees_equivalent(const StateNode& mdp, const HistoryNode<S>& pomdp, double tol) {
    if (mdp.visit_count != pomdp.visit_count) return false;
    if (std::abs(mdp.value - pomdp.value) > tol) return false;
    if (mdp.children.size() != pomdp.children.size()) return false;
    for (std::size_t a = 0; a < mdp.children.size(); ++a) {
        const ActionNode* ma = mdp.children[a].get();
        const HistoryActionNode<S>* pa = pomdp.children[a].get();
        if ((ma == nullptr) != (pa == nullptr)) return false;
        if (!ma) continue;
        if (ma->visit_count != pa->visit_count) return false;
        if (std::abs(ma->value - pa->value) > tol) return false;
        if (ma->children.size() != pa->children.size()) return false;
        for (const auto& [key, child] : ma->children) {
            const auto it = pa->children.find(static_cast<int>(key));
            if (it == pa->children.end()) return false;
            if (!trees_equivalent(*child, *it->second, tol)) return false;
        }
    }
    return true;
}

template <class S>
bool history_trees_match(const HistoryNode<S>& a, const HistoryNode<S>& b, double tol) {
    if (a.visit_count != b.visit_count) return false;
    if (std::abs(a.value - b.value) > tol) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        const auto* ca = a.children[i].get();
        const auto* cb = b.children[i].get();
        if ((ca == nullptr) != (cb == nullptr)) return false;
        if (!ca) continue;
        if (ca->visit_count != cb->visit_count) return false;
        if (std::abs(ca->value - cb->value) > tol) return false;
        if (ca->children.size() != cb->children.size()) return false;
        for (const auto& [obs, child] : ca->children) {
            const auto it = cb->children.find(obs);
            if (it == cb->children.end()) return false;
            if (!history_trees_match(*child, *it->second, tol)) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("scale_reward") {
    CHECK(scale_reward(-10.0, -10.0, 10.0) == 0.0);
    CHECK(scale_reward(10.0, -10.0, 10.0) == 1.0);
    // +10 food reward under pocman bounds (-100, +25): 110/125
    CHECK(scale_reward(10.0, -100.0, 25.0) == doctest::Approx(0.88).epsilon(1e-12));
    CHECK_THROWS_AS(scale_reward(0.0, 1.0, 1.0), std::invalid_argument);
    // out-of-band rewards clamp
    CHECK(scale_reward(-200.0, -100.0, 25.0) == 0.0);
}

TEST_CASE("degenerate fully observable POMDP matches the MDP search") {
    const envs::FrozenLake lake;
    const FrozenLakePomdp wrapped{&lake};
    for (int seed = 0; seed < 8; ++seed) {
        SearchConfig cfg;
        cfg.order = PowerOrder::finite(1.0);
        cfg.simulations_per_move = 300;
        cfg.rng_seed = derive_seed(60, seed);

        MdpPlanner<envs::FrozenLake> mdp(lake, cfg);
        const int a_mdp = mdp.plan(lake.initial_state());

        PomdpPlanner<FrozenLakePomdp> pomdp(wrapped, cfg, 1);
        pomdp.set_root_belief({lake.initial_state()});
        const int a_pomdp = pomdp.plan();

        REQUIRE(a_mdp == a_pomdp);
        REQUIRE(trees_equivalent(*mdp.root(), *pomdp.root(), 0.0));
    }
}

TEST_CASE("p = 1 power backup reduces to the reference POMCP bit for bit") {
    const envs::RockSample rocks(5, 3);
    for (int seed = 0; seed < 6; ++seed) {
        SearchConfig power_cfg;
        power_cfg.order = PowerOrder::finite(1.0);
        power_cfg.backup_kind = BackupKind::power_mean;
        power_cfg.gamma = 0.95;
        power_cfg.simulations_per_move = 400;
        power_cfg.max_depth = 60;
        power_cfg.rng_seed = derive_seed(61, seed);
        SearchConfig ref_cfg = power_cfg;
        ref_cfg.backup_kind = BackupKind::average_reference;

        PomdpPlanner<envs::RockSample> power(rocks, power_cfg, 64);
        PomdpPlanner<envs::RockSample> reference(rocks, ref_cfg, 64);
        const int a_power = power.plan();
        const int a_ref = reference.plan();
        REQUIRE(a_power == a_ref);
        REQUIRE(history_trees_match(*power.root(), *reference.root(), 0.0));
    }
}

TEST_CASE("values stay within the scaled bound") {
    const envs::RockSample rocks(7, 5);
    SearchConfig cfg;
    cfg.order = PowerOrder::finite(4.0);
    cfg.gamma = 0.95;
    cfg.simulations_per_move = 3000;
    cfg.max_depth = 100;
    cfg.rng_seed = 99;
    PomdpPlanner<envs::RockSample> planner(rocks, cfg, 256);
    planner.plan();
    const double v_max = 1.0 / (1.0 - cfg.gamma);
    std::vector<const HistoryNode<envs::RockSample::State>*> stack{planner.root()};
    std::int64_t nodes = 0;
    while (!stack.empty()) {
        const auto* node = stack.back();
        stack.pop_back();
        ++nodes;
        REQUIRE(node->value >= -1e-12);
        REQUIRE(node->value <= v_max + 1e-9);
        std::int64_t child_total = 0;
        bool internal = false;
        for (const auto& action : node->children) {
            if (!action) continue;
            internal = true;
            child_total += action->visit_count;
            REQUIRE(action->visit_count >= 1);
            REQUIRE(action->value >= -1e-12);
            REQUIRE(action->value <= v_max + 1e-9);
            for (const auto& [obs, child] : action->children) stack.push_back(child.get());
        }
        if (internal && !node->leaf_init) REQUIRE(node->visit_count == child_total);
    }
    CHECK(nodes > 10);
}

TEST_CASE("empty belief is rejected") {
    const envs::RockSample rocks(5, 2);
    SearchConfig cfg;
    cfg.simulations_per_move = 10;
    PomdpPlanner<envs::RockSample> planner(rocks, cfg, 16);
    planner.set_root_belief({});
    CHECK_THROWS_WITH_AS(planner.plan(), "belief collapsed", std::runtime_error);
}

TEST_CASE("advance filters particles against the received observation") {
    // Sensing a rock from distance zero is exact, so after observing `good`
    // every surviving particle must carry a good rock.
    const envs::RockSample rocks(5, 2);
    const auto [rx, ry] = rocks.rock_position(0);

    SearchConfig cfg;
    cfg.simulations_per_move = 64;
    cfg.gamma = 0.95;
    cfg.rng_seed = 17;
    PomdpPlanner<envs::RockSample> planner(rocks, cfg, 50);

    std::vector<envs::RockSampleState> particles;
    Rng init_rng(3);
    for (int i = 0; i < 100; ++i) {
        envs::RockSampleState s;
        s.x = static_cast<std::int8_t>(rx);
        s.y = static_cast<std::int8_t>(ry);
        s.rock_good = init_rng.uniform_below(4);  // both rocks random
        particles.push_back(s);
    }
    planner.set_root_belief(particles);

    envs::RockSampleState true_state = particles[0];
    true_state.rock_good |= 1;  // rock 0 is good
    Rng env_rng(5);
    const auto step = rocks.sample(true_state, envs::RockSample::kSenseBase + 0, env_rng);
    REQUIRE(step.observation == envs::RockSample::kObsGood);

    planner.advance(envs::RockSample::kSenseBase + 0, step.observation);
    REQUIRE_FALSE(planner.root()->belief.empty());
    for (const auto& particle : planner.root()->belief)
        REQUIRE((particle.rock_good & 1ull) != 0);
}

TEST_CASE("fully observable advance collapses the belief") {
    const envs::FrozenLake lake;
    const FrozenLakePomdp wrapped{&lake};
    SearchConfig cfg;
    cfg.simulations_per_move = 200;
    cfg.rng_seed = 8;
    PomdpPlanner<FrozenLakePomdp> planner(wrapped, cfg, 32);

    const int action = planner.plan();
    Rng env_rng(11);
    const auto step = wrapped.sample(lake.initial_state(), action, env_rng);
    if (!step.terminal) {
        planner.advance(action, step.observation);
        for (const auto& particle : planner.root()->belief)
            REQUIRE(lake.state_key(particle) == static_cast<std::uint64_t>(step.observation));
    }
}

TEST_CASE("unscaling planner returns reproduces raw rewards step by step") {
    const envs::RockSample rocks(5, 3);
    Rng rng(21);
    auto state = rocks.initial_state(rng);
    const double span = rocks.reward_max() - rocks.reward_min();
    for (int t = 0; t < 50 && !rocks.is_terminal(state); ++t) {
        const int action = static_cast<int>(rng.uniform_below(rocks.action_count()));
        const auto step = rocks.sample(state, action, rng);
        const double scaled = scale_reward(step.reward, rocks.reward_min(), rocks.reward_max());
        const double unscaled = scaled * span + rocks.reward_min();
        REQUIRE(std::abs(unscaled - step.reward) <= 1e-9);
        if (step.terminal) break;
        state = step.next_state;
    }
}
