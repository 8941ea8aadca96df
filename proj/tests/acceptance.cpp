// Acceptance suite: one pass/fail line per criterion. Exit code 0 iff every
// criterion holds. Criteria with measured quantities print them as indented
// detail lines.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "envkit/a2c.hpp"
#include "envkit/batch.hpp"
#include "envkit/distrib.hpp"
#include "envkit/envs/cvrp.hpp"
#include "envkit/envs/game2048.hpp"
#include "envkit/envs/jobshop.hpp"
#include "envkit/envs/knapsack.hpp"
#include "envkit/envs/rubiks_cube.hpp"
#include "envkit/envs/sliding_tile.hpp"
#include "envkit/envs/snake.hpp"
#include "envkit/envs/tsp.hpp"
#include "envkit/fileio.hpp"
#include "envkit/registry.hpp"
#include "envkit/tsp_generators.hpp"
#include "oracles.hpp"

using namespace envkit;

namespace {

int failures = 0;
std::vector<std::string> details;

void detail(const std::string& line) {
    details.push_back("    " + line);
}

void report(int number, const std::string& name, bool pass, const std::string& note = "") {
    std::printf("[%s] criterion %d: %s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                note.empty() ? "" : (" (" + note + ")").c_str());
    for (const auto& line : details) {
        std::printf("%s\n", line.c_str());
    }
    details.clear();
    std::fflush(stdout);
    if (!pass) {
        ++failures;
    }
}

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// ------------------------------------------------------------- criterion 1

bool check_game2048_lines() {
    const std::int32_t vals[4] = {0, 2, 4, 8};
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            for (int c = 0; c < 4; ++c) {
                for (int d = 0; d < 4; ++d) {
                    std::array<std::int32_t, 4> line = {vals[a], vals[b], vals[c], vals[d]};
                    auto [expected, expected_reward] = oracles::ref_2048_line(line);
                    auto got = line;
                    const auto reward = envs::shift_and_merge_line(got);
                    if (got != expected || reward != expected_reward) {
                        detail("2048 line mismatch");
                        return false;
                    }
                }
            }
        }
    }
    detail("game2048: all 256 lines match the reference");
    return true;
}

bool check_cube() {
    const envs::RubiksCube env(Params{{"cube_size", "3"}, {"num_scrambles", "0"}});
    envs::CubeState solved;
    env.reset_into(rng::key_from_seed(1), solved);
    for (int face = 0; face < 6; ++face) {
        for (int dir = 0; dir < 3; ++dir) {
            const int inv = dir == 2 ? 2 : 1 - dir;
            const auto once = envs::cube_move(solved.stickers, 3, face, 0, dir);
            if (envs::cube_move(once, 3, face, 0, inv) != solved.stickers) {
                detail("cube: move-inverse identity failed");
                return false;
            }
        }
    }
    // Color conservation over 10^4 random products.
    auto stickers = solved.stickers;
    const rng::Key k = rng::key_from_seed(2);
    for (int t = 0; t < 10000; ++t) {
        const rng::Key mk = rng::fold_in(k, static_cast<std::uint64_t>(t));
        stickers = envs::cube_move(stickers, 3, static_cast<int>(rng::randint_at(mk, 0, 0, 6)), 0,
                                   static_cast<int>(rng::randint_at(mk, 1, 0, 3)));
    }
    std::array<int, 6> counts{};
    for (std::int8_t c : stickers) {
        counts[static_cast<std::size_t>(c)] += 1;
    }
    for (int c : counts) {
        if (c != 9) {
            detail("cube: color counts drifted");
            return false;
        }
    }
    // Inverted scrambles of length 1..3 end solved with reward 1.
    for (int scrambles = 1; scrambles <= 3; ++scrambles) {
        for (int trial = 0; trial < 25; ++trial) {
            const auto env2 = envs::make_rubiks_cube(
                "RubiksCube-acceptance-v0",
                Params{{"cube_size", "3"}, {"num_scrambles", std::to_string(scrambles)},
                       {"step_limit", "20"}});
            const rng::Key key =
                rng::fold_in(rng::key_from_seed(100 + scrambles), static_cast<std::uint64_t>(trial));
            auto [state, ts] = env2->reset(key);
            const auto keys = rng::split(key, 2);
            std::vector<Action> moves;
            for (int m = 0; m < scrambles; ++m) {
                const rng::Key mk = rng::fold_in(keys[1], static_cast<std::uint64_t>(m));
                moves.push_back({rng::randint_at(mk, 0, 0, 6), rng::randint_at(mk, 1, 0, 1),
                                 rng::randint_at(mk, 2, 0, 3)});
            }
            double reward = 0.0;
            bool ended = false;
            for (auto it = moves.rbegin(); it != moves.rend() && !ended; ++it) {
                Action inverse = *it;
                inverse[2] = inverse[2] == 2 ? 2 : 1 - inverse[2];
                auto [next, ts2] = env2->step(*state, inverse);
                state = std::move(next);
                reward = ts2.reward;
                ended = ts2.last();
            }
            if (!ended || reward != 1.0) {
                detail("cube: inverted scramble did not solve");
                return false;
            }
        }
    }
    detail("cube: 18 move inverses, color conservation, inverted scrambles solved");
    return true;
}

bool check_sliding_tile() {
    const auto reachable = oracles::sliding_tile_reachable_3x3();
    const envs::SlidingTile env(Params{{"grid_size", "3"}, {"shuffle_moves", "80"}});
    for (int t = 0; t < 500; ++t) {
        envs::PuzzleState s;
        env.reset_into(rng::fold_in(rng::key_from_seed(3), static_cast<std::uint64_t>(t)), s);
        if (reachable.count(oracles::encode_tiles_3x3(s.tiles)) != 1) {
            detail("sliding tile: unsolvable instance generated");
            return false;
        }
    }
    detail("sliding tile: 500 generated 3x3 instances all BFS-solvable");
    return true;
}

bool check_tsp_optimum() {
    for (int n : {7, 8}) {
        const auto env = envs::make_tsp("TSP-acceptance-v1",
                                        Params{{"num_cities", std::to_string(n)}});
        auto [root, t0] = env->reset(rng::key_from_seed(4 + n));
        const auto coords = unbox<envs::TspState>(*root).coords_xy;
        const double optimum = oracles::brute_force_tsp(coords);
        std::vector<std::int32_t> rest;
        for (int c = 1; c < n; ++c) {
            rest.push_back(c);
        }
        double best = -std::numeric_limits<double>::infinity();
        do {
            auto [cur, tr0] = env->reset(rng::key_from_seed(4 + n));
            double ret = 0.0;
            auto [s1, tr1] = env->step(*cur, Action{0});
            ret += tr1.reward;
            cur = std::move(s1);
            for (std::int32_t city : rest) {
                auto [nxt, tr] = env->step(*cur, Action{city});
                ret += tr.reward;
                cur = std::move(nxt);
            }
            best = std::max(best, ret);
        } while (std::next_permutation(rest.begin(), rest.end()));
        if (std::abs(best + optimum) > 1e-9 * std::max(1.0, optimum)) {
            detail("tsp: best return mismatch at n=" + std::to_string(n));
            return false;
        }
        detail("tsp n=" + std::to_string(n) + ": best return matches brute force " +
               std::to_string(optimum));
    }
    return true;
}

bool check_cvrp_optimum() {
    const auto env = envs::make_cvrp(
        "CVRP-acceptance-v1",
        Params{{"num_customers", "5"}, {"capacity", "10"}, {"max_demand", "9"}});
    auto [root, t0] = env->reset(rng::key_from_seed(17));
    const auto s0 = unbox<envs::CvrpState>(*root);
    const double optimum = oracles::brute_force_cvrp(s0.coords_xy, s0.demands, 10);
    double best = -std::numeric_limits<double>::infinity();
    const std::function<void(const StateBase&, double)> dfs = [&](const StateBase& state,
                                                                  double ret) {
        const auto& cs = unbox<envs::CvrpState>(state);
        if (-cs.route_length <= best) {
            return;
        }
        const auto mask = env->action_mask(state);
        for (std::size_t node = 0; node < mask.size(); ++node) {
            if (!mask[node]) {
                continue;
            }
            auto [next, tr] = env->step(state, Action{static_cast<std::int64_t>(node)});
            if (tr.last()) {
                best = std::max(best, ret + tr.reward);
            } else {
                dfs(*next, ret + tr.reward);
            }
        }
    };
    dfs(*root, 0.0);
    if (std::abs(best + optimum) > 1e-9 * std::max(1.0, optimum)) {
        detail("cvrp: best return mismatch");
        return false;
    }
    detail("cvrp n=5: best return matches brute force " + std::to_string(optimum));
    return true;
}

bool check_knapsack_optimum() {
    const auto env = envs::make_knapsack("Knapsack-acceptance-v1",
                                         Params{{"num_items", "12"}, {"capacity", "3.0"}});
    auto [root, t0] = env->reset(rng::key_from_seed(18));
    const auto s0 = unbox<envs::KnapsackState>(*root);
    const double optimum = oracles::brute_force_knapsack(s0.weights, s0.values, 3.0);
    std::uint32_t best_subset = 0;
    double best_value = -1.0;
    for (std::uint32_t subset = 0; subset < (1u << 12); ++subset) {
        double w = 0.0, v = 0.0;
        for (int i = 0; i < 12; ++i) {
            if (subset & (1u << i)) {
                w += s0.weights[static_cast<std::size_t>(i)];
                v += s0.values[static_cast<std::size_t>(i)];
            }
        }
        if (w <= 3.0 && v > best_value) {
            best_value = v;
            best_subset = subset;
        }
    }
    double ret = 0.0;
    StatePtr cur = root->clone();
    for (int i = 0; i < 12; ++i) {
        if (best_subset & (1u << i)) {
            auto [next, tr] = env->step(*cur, Action{i});
            ret += tr.reward;
            cur = std::move(next);
        }
    }
    if (std::abs(ret - optimum) > 1e-9 * std::max(1.0, optimum)) {
        detail("knapsack: optimal subset return mismatch");
        return false;
    }
    detail("knapsack n=12: subset optimum " + std::to_string(optimum) + " achieved in-env");
    return true;
}

bool check_jobshop_optimum() {
    const auto env = envs::make_jobshop(
        "JobShop-acceptance-v0", Params{{"num_jobs", "3"}, {"num_machines", "2"}, {"max_ops", "2"},
                                        {"max_duration", "3"}});
    auto [root, t0] = env->reset(rng::key_from_seed(19));
    const auto s0 = unbox<envs::JobShopState>(*root);
    oracles::JobShopOps problem;
    problem.num_machines = 2;
    problem.ops.resize(3);
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < s0.instance.num_ops[static_cast<std::size_t>(j)]; ++k) {
            problem.ops[static_cast<std::size_t>(j)].emplace_back(
                s0.instance.op_machine[static_cast<std::size_t>(j * 2 + k)],
                s0.instance.op_duration[static_cast<std::size_t>(j * 2 + k)]);
        }
    }
    const int optimum = oracles::brute_force_jobshop_makespan(problem);
    int best_steps = std::numeric_limits<int>::max();
    const auto heads = env->action_head_sizes();
    const std::function<void(const StateBase&, int)> dfs = [&](const StateBase& state, int steps) {
        if (steps >= best_steps) {
            return;
        }
        const auto mask = env->action_mask(state);
        std::vector<std::vector<std::int64_t>> options(heads.size());
        for (std::size_t m = 0; m < heads.size(); ++m) {
            for (int j = 0; j < heads[m]; ++j) {
                if (mask[m * static_cast<std::size_t>(heads[m]) + static_cast<std::size_t>(j)]) {
                    options[m].push_back(j);
                }
            }
        }
        std::vector<std::size_t> pick(heads.size(), 0);
        while (true) {
            Action action;
            bool duplicate = false;
            for (std::size_t m = 0; m < heads.size(); ++m) {
                const std::int64_t j = options[m][pick[m]];
                for (std::int64_t prev : action) {
                    if (prev == j && j != 3) {
                        duplicate = true;
                    }
                }
                action.push_back(j);
            }
            if (!duplicate) {
                auto [next, tr] = env->step(state, action);
                if (tr.last()) {
                    best_steps = std::min(best_steps, steps + 1);
                } else {
                    dfs(*next, steps + 1);
                }
            }
            std::size_t m = 0;
            while (m < heads.size() && ++pick[m] == options[m].size()) {
                pick[m] = 0;
                ++m;
            }
            if (m == heads.size()) {
                break;
            }
        }
    };
    dfs(*root, 0);
    if (best_steps != optimum) {
        detail("jobshop: best makespan " + std::to_string(best_steps) + " vs oracle " +
               std::to_string(optimum));
        return false;
    }
    detail("jobshop 3x2: best return matches brute-force makespan " + std::to_string(optimum));
    return true;
}

// ------------------------------------------------------------- criterion 2

bool check_snake_optimum(int grid, double expected) {
    const auto env = envs::make_snake(
        "Snake-acceptance-v1",
        Params{{"grid_size", std::to_string(grid)}, {"horizon", "0"}});
    auto [state, ts] = env->reset(rng::key_from_seed(20 + grid));
    double total = 0.0;
    long guard = 0;
    while (!env->is_terminal(*state) && guard++ < 200000) {
        const auto s = unbox<envs::SnakeState>(*state);
        const int action = oracles::snake_cycle_action(grid, s.body[0]);
        auto [next, tr] = env->step(*state, Action{action});
        total += tr.reward;
        state = std::move(next);
    }
    detail("snake g=" + std::to_string(grid) + ": scripted return " + std::to_string(total) +
           " (expected " + std::to_string(expected) + ")");
    return total == expected;
}

// ------------------------------------------------------------- criterion 3

struct Snapshot {
    std::vector<TimeStep> steps;
    std::vector<StatePtr> states;
};

bool snapshots_equal(const Environment& env, const Snapshot& a, const Snapshot& b) {
    if (a.steps.size() != b.steps.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        if (!(a.steps[k] == b.steps[k]) || !env.states_equal(*a.states[k], *b.states[k])) {
            return false;
        }
    }
    return true;
}

Snapshot run_wrapped(const Environment& wrapped, rng::Key key, int steps) {
    Snapshot snap;
    const auto keys = rng::split(key, 2);
    auto [state, ts] = wrapped.reset(rng::split(keys[0], 1)[0]);
    for (int t = 0; t < steps; ++t) {
        std::vector<char> mask = wrapped.action_mask(*state);
        // Matches the batch random policy's key folding: step -> entry 0 -> head.
        const rng::Key step_key = rng::fold_in(keys[1], static_cast<std::uint64_t>(t));
        const rng::Key row_key = rng::fold_in(step_key, 0);
        const auto heads = wrapped.action_head_sizes();
        Action action;
        int offset = 0;
        for (std::size_t h = 0; h < heads.size(); ++h) {
            std::vector<char> head_mask(mask.begin() + offset, mask.begin() + offset + heads[h]);
            wrapped.constrain_head(static_cast<int>(h), action, head_mask);
            const std::vector<double> zeros(static_cast<std::size_t>(heads[h]), 0.0);
            action.push_back(
                masked_categorical_sample(zeros, head_mask, rng::fold_in(row_key, h)).index);
            offset += heads[h];
        }
        auto [next, tr] = wrapped.step(*state, action);
        state = std::move(next);
        snap.steps.push_back(tr);
        snap.states.push_back(state->clone());
    }
    return snap;
}

bool check_determinism_and_batching() {
    for (const auto& desc : default_registry().descriptors()) {
        const auto env = default_registry().make(desc.id);
        const auto wrapped = auto_reset_wrap(env);

        // (a) same key, bit-identical 500-step trajectories.
        const Snapshot s1 = run_wrapped(*wrapped, rng::key_from_seed(42), 500);
        const Snapshot s2 = run_wrapped(*wrapped, rng::key_from_seed(42), 500);
        if (!snapshots_equal(*env, s1, s2)) {
            detail(desc.id + ": repeated trajectories differ");
            return false;
        }

        // (b) batch-of-one equals the wrapper bit-exactly.
        auto batch = env->make_batch(1);
        const auto keys = rng::split(rng::key_from_seed(42), 2);
        batch->reset_all(keys[0], 1);
        const auto policy = make_random_policy(*batch);
        std::vector<double> obs(static_cast<std::size_t>(batch->obs_dim()));
        std::vector<char> masks(static_cast<std::size_t>(batch->mask_dim()));
        std::vector<std::int64_t> actions(batch->head_sizes().size());
        for (int t = 0; t < 500; ++t) {
            batch->write_flat_obs(obs, 1);
            batch->write_masks(masks, 1);
            BatchObsView view{1, batch->obs_dim(), batch->mask_dim(), obs.data(), masks.data()};
            policy(view, rng::fold_in(keys[1], static_cast<std::uint64_t>(t)), actions, masks);
            batch->step(actions, StepMode::auto_reset, 1);
            const TimeStep got = batch->timestep_of(0);
            if (!(got == s1.steps[static_cast<std::size_t>(t)]) ||
                !env->states_equal(*batch->state_of(0), *s1.states[static_cast<std::size_t>(t)])) {
                detail(desc.id + ": batch-of-one diverges from the wrapper at step " +
                       std::to_string(t));
                return false;
            }
        }

        // (c) 64-entry 100-step rollouts across 1/2/8 worker threads.
        Trajectory base;
        for (int threads : {1, 2, 8}) {
            auto b = env->make_batch(64);
            const auto bkeys = rng::split(rng::key_from_seed(7), 2);
            b->reset_all(bkeys[0], threads);
            const auto pol = make_random_policy(*b);
            Trajectory traj = rollout(*b, bkeys[1], pol, 100, threads);
            if (threads == 1) {
                base = std::move(traj);
            } else if (traj.rewards != base.rewards || traj.discounts != base.discounts ||
                       traj.step_types != base.step_types ||
                       traj.observations != base.observations ||
                       traj.actions != base.actions) {
                detail(desc.id + ": rollout differs at " + std::to_string(threads) + " threads");
                return false;
            }
        }
    }
    detail("all 10 registered environments: repeatable, batch-of-one exact, thread invariant");
    return true;
}

// ------------------------------------------------------------- criterion 4

bool check_reset_frugality() {
    const auto env = default_registry().make("Maze-v0", Params{{"rows", "7"}, {"cols", "7"}});
    auto batch = env->make_batch(64);
    batch->reset_all(rng::key_from_seed(31), 2);
    const auto policy = make_random_policy(*batch);
    std::vector<double> obs(static_cast<std::size_t>(64 * batch->obs_dim()));
    std::vector<char> masks(static_cast<std::size_t>(64 * batch->mask_dim()));
    std::vector<std::int64_t> actions(64);
    std::uint64_t before = batch->reset_count();
    bool saw_zero = false, saw_some = false;
    for (int t = 0; t < 150; ++t) {
        batch->write_flat_obs(obs, 2);
        batch->write_masks(masks, 2);
        BatchObsView view{64, batch->obs_dim(), batch->mask_dim(), obs.data(), masks.data()};
        policy(view, rng::fold_in(rng::key_from_seed(32), static_cast<std::uint64_t>(t)), actions,
               masks);
        batch->step(actions, StepMode::auto_reset, 2);
        int terminated = 0;
        for (int i = 0; i < 64; ++i) {
            terminated += batch->step_types()[static_cast<std::size_t>(i)] ==
                          static_cast<std::uint8_t>(StepType::Last);
        }
        const std::uint64_t after = batch->reset_count();
        if (after - before != static_cast<std::uint64_t>(terminated)) {
            detail("reset count diverged from terminations at step " + std::to_string(t));
            return false;
        }
        saw_zero = saw_zero || terminated == 0;
        saw_some = saw_some || terminated > 0;
        before = after;
    }
    if (!saw_zero || !saw_some) {
        detail("did not observe both zero-reset and resetting steps");
        return false;
    }
    detail("reset calls == terminated entries on every step; zero-termination steps reset nothing");
    return true;
}

// ------------------------------------------------------------- criterion 5

bool check_throughput_shape() {
    const unsigned hw = std::thread::hardware_concurrency();
    const int threads = hw == 0 ? 1 : static_cast<int>(hw);
    bool property = true;
    for (int run = 0; run < 3; ++run) {
        for (const char* id : {"Snake-v1", "Maze-v0"}) {
            const auto env = default_registry().make(id);
            double sps[3] = {0, 0, 0};
            const int sizes[3] = {1, 64, 512};
            for (int k = 0; k < 3; ++k) {
                const auto rep = run_throughput_epoch(*env, rng::key_from_seed(51 + run), sizes[k],
                                                      50, 500, threads);
                sps[k] = rep.steps_per_second;
            }
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s run %d: B=1 %.3g, B=64 %.3g, B=512 %.3g steps/s",
                          id, run, sps[0], sps[1], sps[2]);
            detail(buf);
            if (!(sps[1] >= sps[0] && sps[2] >= 5.0 * sps[0])) {
                property = false;
            }
        }
    }
    if (hw < 4) {
        detail("hardware threads = " + std::to_string(hw) +
               " < 4: criterion precondition not met; property " +
               std::string(property ? "held anyway" : "not established on this machine"));
        return true; // vacuous on this machine; measurements reported above
    }
    return property;
}

// ------------------------------------------------------------- criterion 6

bool check_gradients() {
    for (const char* id : {"TSP-v1", "RubiksCube-partly-scrambled-v0"}) {
        const auto env = std::string(id) == "TSP-v1"
                             ? default_registry().make(id, Params{{"num_cities", "4"}})
                             : default_registry().make(id);
        int num_logits = 0;
        for (int h : env->action_head_sizes()) {
            num_logits += h;
        }
        auto params =
            nn::make_mlp(env->flat_obs_dim(), {8}, num_logits, false, rng::key_from_seed(61));
        auto core = env->make_batch(2);
        const auto keys = rng::split(rng::key_from_seed(62), 2);
        core->reset_all(keys[0], 1);
        const auto policy = a2c::make_net_policy(*core, &params);
        const Trajectory traj = rollout(*core, keys[1], policy, 3, 1);
        const std::size_t nb = 3 * 2;
        std::vector<double> adv(nb), tgt(nb);
        for (std::size_t k = 0; k < nb; ++k) {
            adv[k] = 0.3 * static_cast<double>(k) - 0.8;
            tgt[k] = 0.2 * static_cast<double>(k) - 0.1;
        }
        a2c::TrainConfig cfg;
        cfg.value_weight = 0.5;
        cfg.entropy_weight = 0.01;
        auto grads = nn::zeros_like(params);
        a2c::a2c_loss_and_grads(params, traj, adv, tgt, env->action_head_sizes(), cfg, grads);
        const auto flat_grads = nn::to_flat(grads);
        auto flat = nn::to_flat(params);
        const double h = 1e-5;
        double worst = 0.0;
        for (std::size_t p = 0; p < flat.size(); ++p) {
            const double saved = flat[p];
            flat[p] = saved + h;
            nn::from_flat(params, flat);
            const double up = a2c::a2c_loss(params, traj, adv, tgt, env->action_head_sizes(), cfg).total;
            flat[p] = saved - h;
            nn::from_flat(params, flat);
            const double down =
                a2c::a2c_loss(params, traj, adv, tgt, env->action_head_sizes(), cfg).total;
            flat[p] = saved;
            const double fd = (up - down) / (2 * h);
            const double rel = std::abs(flat_grads[p] - fd) /
                               std::max(1.0, std::max(std::abs(fd), std::abs(flat_grads[p])));
            worst = std::max(worst, rel);
        }
        nn::from_flat(params, flat);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s: %zu parameters, worst relative error %.3g", id,
                      flat.size(), worst);
        detail(buf);
        if (worst >= 1e-4) {
            return false;
        }
    }
    return true;
}

// ------------------------------------------------------------- criterion 7

Params env_overrides(const Params& config) {
    Params overrides;
    for (const auto& [key, value] : config.entries()) {
        if (key.rfind("env.", 0) == 0) {
            overrides.set(key.substr(4), value);
        }
    }
    return overrides;
}

bool check_learning_maze() {
    const Params config =
        io::load_config(std::string(ENVKIT_CONFIG_DIR) + "/maze6_acceptance.cfg");
    const auto env = default_registry().make(config.get_string("env_id", ""),
                                             env_overrides(config));
    const a2c::TrainConfig cfg = a2c::config_from_params(config);
    const auto result = a2c::train(*env, cfg);
    const double trained = a2c::evaluate(*env, &result.params, 200, rng::key_from_seed(71), true,
                                         cfg.eval_max_steps)
                               .mean_return;
    const double random = a2c::random_baseline(*env, 200, rng::key_from_seed(72)).mean_return;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "maze 6x6: trained success %.3f, random %.3f", trained, random);
    detail(buf);
    return trained >= 0.95 && trained >= random + 0.5;
}

bool check_learning_tsp() {
    const Params config = io::load_config(std::string(ENVKIT_CONFIG_DIR) + "/tsp5_acceptance.cfg");
    const auto env = default_registry().make(config.get_string("env_id", ""),
                                             env_overrides(config));
    const a2c::TrainConfig cfg = a2c::config_from_params(config);
    const auto result = a2c::train(*env, cfg);

    // Matched-instance optima: the oracle runs on the same reset keys the
    // evaluator uses.
    const int episodes = 200;
    const rng::Key eval_key = rng::key_from_seed(71);
    const double trained =
        a2c::evaluate(*env, &result.params, episodes, eval_key, true, cfg.eval_max_steps)
            .mean_return;
    double opt_sum = 0.0;
    for (int e = 0; e < episodes; ++e) {
        auto [state, ts] = env->reset(rng::fold_in(eval_key, static_cast<std::uint64_t>(e)));
        opt_sum += oracles::brute_force_tsp(unbox<envs::TspState>(*state).coords_xy);
    }
    const double mean_optimum = opt_sum / episodes;
    const double random =
        a2c::random_baseline(*env, episodes, rng::key_from_seed(72)).mean_return;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "tsp 5: trained %.4f, optimum %.4f (gap %.2f%%), random %.4f", trained,
                  -mean_optimum, (trained / -mean_optimum - 1.0) * 100.0, random);
    detail(buf);
    return trained >= -1.05 * mean_optimum && trained > random;
}

bool check_learning_snake() {
    const Params config =
        io::load_config(std::string(ENVKIT_CONFIG_DIR) + "/snake6_acceptance.cfg");
    const auto env = default_registry().make(config.get_string("env_id", ""),
                                             env_overrides(config));
    const a2c::TrainConfig cfg = a2c::config_from_params(config);
    const auto result = a2c::train(*env, cfg);
    const double trained = a2c::evaluate(*env, &result.params, 200, rng::key_from_seed(71), true,
                                         cfg.eval_max_steps)
                               .mean_return;
    const double random = a2c::random_baseline(*env, 200, rng::key_from_seed(72)).mean_return;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "snake 6x6: trained return %.3f, random %.3f", trained, random);
    detail(buf);
    return trained >= 2.0 * random;
}

// ------------------------------------------------------------- criterion 8

bool check_generator_geometry() {
    using namespace envkit::gen;
    const Point center{0.5, 0.5};
    const auto cluster = cluster_generate(rng::key_from_seed(81), 10000, center, 0.2);
    for (const auto& p : cluster) {
        const double d = std::hypot(p[0] - center[0], p[1] - center[1]);
        if (d > 0.2 + 1e-12) {
            detail("cluster point outside the radius");
            return false;
        }
    }
    const Point a{0.1, 0.5}, b{0.9, 0.5};
    const auto comp = compression_generate(rng::key_from_seed(82), 10000, a, b, 0.02);
    for (const auto& p : comp) {
        if (std::abs(p[1] - 0.5) > 0.02 + 1e-12) {
            detail("compression offset beyond the thickness");
            return false;
        }
    }
    const auto expl = explosion_generate(rng::key_from_seed(83), 10000, center, 0.3);
    int near = 0;
    for (const auto& p : expl) {
        near += std::hypot(p[0] - center[0], p[1] - center[1]) < 0.25 ? 1 : 0;
    }
    if (near >= 100) {
        detail("explosion left " + std::to_string(near) + "/10000 points near the reference");
        return false;
    }
    const std::vector<double> weights{1.0, 1.0, 1.0, 1.0};
    int counts[4] = {0, 0, 0, 0};
    for (int t = 0; t < 10000; ++t) {
        counts[mixture_select(rng::fold_in(rng::key_from_seed(84), static_cast<std::uint64_t>(t)),
                              weights)] += 1;
    }
    for (int c : counts) {
        if (std::abs(c / 10000.0 - 0.25) > 0.02) {
            detail("mixture selection frequency off: " + std::to_string(c / 10000.0));
            return false;
        }
    }
    detail("cluster radius, compression thickness, explosion clearance, mixture frequencies hold");
    return true;
}

// ------------------------------------------------------------- criterion 9

bool check_prng() {
    std::ifstream in(std::string(ENVKIT_TEST_DATA_DIR) + "/rng_golden.txt");
    if (!in.good()) {
        detail("golden vector file missing");
        return false;
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        std::string hi_s, lo_s, op;
        ss >> hi_s >> lo_s >> op;
        const rng::Key key{std::stoull(hi_s, nullptr, 16), std::stoull(lo_s, nullptr, 16)};
        if (op == "block") {
            std::uint64_t c0, c1;
            std::string x0_s, x1_s;
            ss >> c0 >> c1 >> x0_s >> x1_s;
            const auto [x0, x1] = rng::block(key, c0, c1);
            if (x0 != std::stoull(x0_s, nullptr, 16) || x1 != std::stoull(x1_s, nullptr, 16)) {
                detail("golden block vector mismatch");
                return false;
            }
        } else if (op == "split") {
            std::size_t index;
            std::string hi2, lo2;
            ss >> index >> hi2 >> lo2;
            const auto children = rng::split(key, index + 1);
            if (children[index].hi != std::stoull(hi2, nullptr, 16) ||
                children[index].lo != std::stoull(lo2, nullptr, 16)) {
                detail("golden split vector mismatch");
                return false;
            }
        } else if (op == "fold_in") {
            std::uint64_t data;
            std::string hi2, lo2;
            ss >> data >> hi2 >> lo2;
            const rng::Key folded = rng::fold_in(key, data);
            if (folded.hi != std::stoull(hi2, nullptr, 16) ||
                folded.lo != std::stoull(lo2, nullptr, 16)) {
                detail("golden fold_in vector mismatch");
                return false;
            }
        } else if (op == "uniform01") {
            std::uint64_t index;
            double expected;
            ss >> index >> expected;
            if (rng::uniform01(key, index) != expected) {
                detail("golden uniform01 vector mismatch");
                return false;
            }
        } else if (op == "randint") {
            std::int64_t lo, hi, expected;
            ss >> lo >> hi >> expected;
            if (rng::randint(key, lo, hi) != expected) {
                detail("golden randint vector mismatch");
                return false;
            }
        } else if (op == "permutation") {
            int n;
            ss >> n;
            const auto perm = rng::permutation(key, n);
            for (int i = 0; i < n; ++i) {
                int expected;
                ss >> expected;
                if (perm[static_cast<std::size_t>(i)] != expected) {
                    detail("golden permutation vector mismatch");
                    return false;
                }
            }
        }
    }

    const auto keys = rng::split(rng::key_from_seed(90), 1000000);
    std::set<rng::Key> unique(keys.begin(), keys.end());
    if (unique.size() != keys.size()) {
        detail("split produced colliding keys");
        return false;
    }

    std::vector<double> samples(100000);
    const rng::Key k = rng::key_from_seed(91);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = rng::uniform01(k, i);
    }
    const double stat = oracles::chi_square_uniform_stat(samples, 64);
    const double p = oracles::chi_square_p_value(stat, 63);
    detail("golden vectors match; 10^6 split keys distinct; chi-square p = " + std::to_string(p));
    return p > 0.001;
}

} // namespace

int main(int argc, char** argv) {
    bool skip_training = false;
    bool skip_throughput = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--skip-training") == 0) {
            skip_training = true;
        }
        if (std::strcmp(argv[i], "--skip-throughput") == 0) {
            skip_throughput = true;
        }
    }

    const double t0 = now_seconds();
    {
        bool ok = check_game2048_lines();
        ok = check_cube() && ok;
        ok = check_sliding_tile() && ok;
        ok = check_tsp_optimum() && ok;
        ok = check_cvrp_optimum() && ok;
        ok = check_knapsack_optimum() && ok;
        ok = check_jobshop_optimum() && ok;
        report(1, "dynamics oracles (2048, cube, tile, tsp, cvrp, knapsack, jobshop)", ok);
    }
    report(2, "snake scripted optimum g^2-1 at g=4 and 143 at g=12",
           check_snake_optimum(4, 15.0) && check_snake_optimum(12, 143.0));
    report(3, "determinism and batching (purity, batch-of-one, thread invariance)",
           check_determinism_and_batching());
    report(4, "selective auto-reset frugality", check_reset_frugality());
    if (skip_throughput) {
        report(5, "throughput scaling shape", true, "skipped by flag");
    } else {
        report(5, "throughput scaling shape", check_throughput_shape());
    }
    report(6, "gradient correctness vs central finite differences", check_gradients());
    if (skip_training) {
        report(7, "learning improvement (maze, tsp, snake)", true, "skipped by flag");
    } else {
        bool ok = check_learning_maze();
        ok = check_learning_tsp() && ok;
        ok = check_learning_snake() && ok;
        report(7, "learning improvement (maze, tsp, snake)", ok);
    }
    report(8, "generator geometry (cluster, compression, explosion, mixture)",
           check_generator_geometry());
    report(9, "prng conformance (golden vectors, key distinctness, uniformity)", check_prng());

    std::printf("acceptance: %s (%d criteria failed, %.1f s)\n", failures == 0 ? "PASS" : "FAIL",
                failures, now_seconds() - t0);
    return failures == 0 ? 0 : 1;
}
