#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "envkit/env.hpp"
#include "envkit/envs/maze.hpp"
#include "envkit/errors.hpp"
#include "envkit/fileio.hpp"
#include "envkit/nn.hpp"
#include "envkit/registry.hpp"

using namespace envkit;

namespace {

const std::vector<std::string>& all_env_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& d : default_registry().descriptors()) {
            out.push_back(d.id);
        }
        return out;
    }();
    return ids;
}

} // namespace

TEST_CASE("spec validation accepts and rejects with reasons") {
    const Spec d4 = Spec::discrete(4);
    CHECK_FALSE(d4.validate(Value::scalar_i(3)).has_value());
    auto fail = d4.validate(Value::scalar_i(4));
    REQUIRE(fail.has_value());
    CHECK(fail->reason.find("out of range") != std::string::npos);

    const Spec comp = Spec::composite({
        {"a", Spec::bounded({2}, Dtype::f64, -1.0, 1.0)},
        {"b", Spec::discrete(3)},
    });
    const Value ok = Value::map({
        {"a", Value::tensor_f({2}, {0.0, 0.5})},
        {"b", Value::scalar_i(2)},
    });
    CHECK_FALSE(comp.validate(ok).has_value());

    const Value missing = Value::map({{"a", Value::tensor_f({2}, {0.0, 0.5})}});
    auto miss = comp.validate(missing);
    REQUIRE(miss.has_value());
    CHECK(miss->path == "b");
    CHECK(miss->reason.find("missing") != std::string::npos);

    const Value bad_shape = Value::map({
        {"a", Value::tensor_f({3}, {0.0, 0.5, 0.1})},
        {"b", Value::scalar_i(2)},
    });
    auto shape_fail = comp.validate(bad_shape);
    REQUIRE(shape_fail.has_value());
    CHECK(shape_fail->path == "a");
}

TEST_CASE("spec construction enforces invariants") {
    CHECK_THROWS_AS(Spec::bounded({2}, Dtype::f64, 1.0, -1.0), InvalidArgumentError);
    CHECK_THROWS_AS(Spec::discrete(0), InvalidArgumentError);
    CHECK_THROWS_AS(Spec::composite({{"x", Spec::discrete(2)}, {"x", Spec::discrete(2)}}),
                    InvalidArgumentError);
}

TEST_CASE("generate_value returns the canonical minimum") {
    CHECK(Spec::bounded({2}, Dtype::f64, -1.0, 1.0).generate_value() ==
          Value::tensor_f({2}, {-1.0, -1.0}));
    CHECK(Spec::discrete(4).generate_value() == Value::scalar_i(0));
    CHECK(Spec::multi_discrete({3, 2}).generate_value() == Value::tensor_i({2}, {0, 0}));
    const Spec comp = Spec::composite({{"a", Spec::discrete(2)}});
    CHECK_FALSE(comp.validate(comp.generate_value()).has_value());
}

TEST_CASE("registry: contents, versioning, not-found, conflicts") {
    const auto& reg = default_registry();
    const std::vector<std::string> expected = {
        "Game2048-v1", "RubiksCube-v0", "RubiksCube-partly-scrambled-v0", "SlidingTilePuzzle-v0",
        "Maze-v0",     "Snake-v1",      "TSP-v1",                         "CVRP-v1",
        "Knapsack-v1", "JobShop-v0"};
    REQUIRE(reg.descriptors().size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(reg.descriptors()[i].id == expected[i]);
    }
    CHECK(Registry::parse_version("Snake-v1") == 1);
    CHECK(Registry::parse_version("RubiksCube-partly-scrambled-v0") == 0);
    CHECK_THROWS_AS(Registry::parse_version("Snake"), InvalidArgumentError);

    const auto snake = reg.make("Snake-v1");
    const Spec obs = snake->observation_spec();
    CHECK(obs.child("grid").shape() == std::vector<std::int64_t>{5, 12, 12});

    try {
        reg.make("Snake-v9");
        FAIL("expected NotFoundError");
    } catch (const NotFoundError& e) {
        CHECK(std::string(e.what()).find("Snake-v1") != std::string::npos);
    }

    Registry local;
    local.register_env({"Test-v0", "logic", "t", Params{}, envs::make_maze});
    CHECK_THROWS_AS(local.register_env({"Test-v0", "logic", "t", Params{}, envs::make_maze}),
                    ConflictError);
}

TEST_CASE("make with overrides configures the environment") {
    const auto maze = default_registry().make("Maze-v0", Params{{"rows", "5"}, {"cols", "7"}});
    CHECK(maze->observation_spec().child("walls").shape() == std::vector<std::int64_t>{5, 7});
}

TEST_CASE("reset purity and FIRST contract for every registered environment") {
    for (const auto& id : all_env_ids()) {
        CAPTURE(id);
        const auto env = default_registry().make(id);
        const rng::Key key = rng::key_from_seed(42);
        auto [s1, t1] = env->reset(key);
        auto [s2, t2] = env->reset(key);
        CHECK(env->states_equal(*s1, *s2));
        CHECK(t1 == t2);
        CHECK(t1.step_type == StepType::First);
        CHECK(t1.reward == 0.0);
        CHECK(t1.discount == 1.0);
        CHECK_FALSE(env->observation_spec().validate(t1.observation).has_value());
    }
}

TEST_CASE("step purity: same state and action give identical results") {
    for (const auto& id : all_env_ids()) {
        CAPTURE(id);
        const auto env = default_registry().make(id);
        auto [state, ts] = env->reset(rng::key_from_seed(9));
        const Action action = sample_valid_action(*env, *state, rng::key_from_seed(10));
        auto [n1, t1] = env->step(*state, action);
        auto [n2, t2] = env->step(*state, action); // original state still usable
        CHECK(env->states_equal(*n1, *n2));
        CHECK(t1 == t2);
    }
}

TEST_CASE("generate_value action is spec-valid and never crashes the step") {
    for (const auto& id : all_env_ids()) {
        CAPTURE(id);
        const auto env = default_registry().make(id);
        const Spec aspec = env->action_spec();
        const Value v = aspec.generate_value();
        CHECK_FALSE(aspec.validate(v).has_value());
        Action action;
        if (v.kind() == Value::Kind::IntTensor && v.shape().empty()) {
            action = {v.ints()[0]};
        } else {
            action = v.ints();
        }
        auto [state, ts] = env->reset(rng::key_from_seed(1));
        try {
            env->step(*state, action); // masked-invalid is a clean error
        } catch (const InvalidActionError&) {
        }
    }
}

TEST_CASE("out-of-spec actions raise invalid-action errors") {
    const auto env = default_registry().make("Snake-v1");
    auto [state, ts] = env->reset(rng::key_from_seed(2));
    CHECK_THROWS_AS(env->step(*state, Action{4}), InvalidActionError);
    CHECK_THROWS_AS(env->step(*state, Action{-1}), InvalidActionError);
    CHECK_THROWS_AS(env->step(*state, Action{0, 0}), InvalidActionError);
}

TEST_CASE("stepping a terminal state is a contract violation") {
    // A one-step maze: agent next to target.
    const auto env = default_registry().make("Maze-v0", Params{{"rows", "5"}, {"cols", "5"}});
    auto [state, ts] = env->reset(rng::key_from_seed(3));
    auto maze_state = unbox<envs::MazeState>(*state);
    // Find an open cell adjacent to the target and park the agent there.
    const int rows = 5, cols = 5;
    const int tr = maze_state.target_row, tc = maze_state.target_col;
    int dir = -1;
    const int dr[4] = {-1, 0, 1, 0}, dc[4] = {0, 1, 0, -1};
    for (int d = 0; d < 4; ++d) {
        const int ar = tr - dr[d], ac = tc - dc[d];
        if (ar >= 0 && ar < rows && ac >= 0 && ac < cols &&
            !maze_state.walls[static_cast<std::size_t>(ar * cols + ac)]) {
            maze_state.agent_row = ar;
            maze_state.agent_col = ac;
            dir = d;
            break;
        }
    }
    REQUIRE(dir >= 0);
    const StateBox<envs::MazeState> boxed(maze_state);
    auto [terminal, t_last] = env->step(boxed, Action{dir});
    CHECK(t_last.step_type == StepType::Last);
    CHECK(t_last.reward == 1.0);
    CHECK(t_last.discount == 0.0);
    CHECK(env->is_terminal(*terminal));
    CHECK_THROWS_AS(env->step(*terminal, Action{0}), ContractViolationError);
}

TEST_CASE("auto-reset wrapper: terminal reward with fresh observation") {
    const auto inner = default_registry().make("Maze-v0", Params{{"rows", "5"}, {"cols", "5"}});
    const auto wrapped = auto_reset_wrap(inner);
    auto [state, ts] = wrapped->reset(rng::key_from_seed(3));
    auto maze_state = unbox<envs::MazeState>(*state);
    const int tr = maze_state.target_row, tc = maze_state.target_col;
    int dir = -1;
    const int dr[4] = {-1, 0, 1, 0}, dc[4] = {0, 1, 0, -1};
    for (int d = 0; d < 4; ++d) {
        const int ar = tr - dr[d], ac = tc - dc[d];
        if (ar >= 0 && ar < 5 && ac >= 0 && ac < 5 &&
            !maze_state.walls[static_cast<std::size_t>(ar * 5 + ac)]) {
            maze_state.agent_row = ar;
            maze_state.agent_col = ac;
            dir = d;
            break;
        }
    }
    REQUIRE(dir >= 0);
    const StateBox<envs::MazeState> boxed(maze_state);
    auto [fresh, t_last] = wrapped->step(boxed, Action{dir});
    CHECK(t_last.step_type == StepType::Last);
    CHECK(t_last.reward == 1.0);
    CHECK(t_last.discount == 0.0);
    // The emitted observation is the fresh reset observation, and the next
    // call proceeds from the fresh state without an explicit reset.
    CHECK_FALSE(wrapped->is_terminal(*fresh));
    CHECK(t_last.observation == wrapped->observe(*fresh));
    const Action next = sample_valid_action(*wrapped, *fresh, rng::key_from_seed(4));
    auto [after, t_next] = wrapped->step(*fresh, next);
    CHECK(t_next.step_type != StepType::First);
}

TEST_CASE("auto-reset wrapper passes non-terminal steps through unchanged") {
    const auto inner = default_registry().make("TSP-v1", Params{{"num_cities", "5"}});
    const auto wrapped = auto_reset_wrap(inner);
    auto [state, ts] = inner->reset(rng::key_from_seed(5));
    const Action a{0};
    auto [s_plain, t_plain] = inner->step(*state, a);
    auto [s_wrap, t_wrap] = wrapped->step(*state, a);
    CHECK(inner->states_equal(*s_plain, *s_wrap));
    CHECK(t_plain == t_wrap);
}

TEST_CASE("auto-reset wrapper trajectories are pure") {
    for (const auto& id : {"Game2048-v1", "Maze-v0", "Knapsack-v1"}) {
        CAPTURE(id);
        const auto wrapped = auto_reset_wrap(default_registry().make(id));
        for (int run = 0; run < 2; ++run) {
            // Two identical runs must agree bitwise.
            auto [sa, ta] = wrapped->reset(rng::key_from_seed(77));
            auto [sb, tb] = wrapped->reset(rng::key_from_seed(77));
            CHECK(ta == tb);
            for (int t = 0; t < 60; ++t) {
                const rng::Key ak = rng::fold_in(rng::key_from_seed(78), static_cast<std::uint64_t>(t));
                const Action action = sample_valid_action(*wrapped, *sa, ak);
                const Action action_b = sample_valid_action(*wrapped, *sb, ak);
                CHECK(action == action_b);
                auto [na, t1] = wrapped->step(*sa, action);
                auto [nb, t2] = wrapped->step(*sb, action_b);
                CHECK(wrapped->states_equal(*na, *nb));
                CHECK(t1 == t2);
                sa = std::move(na);
                sb = std::move(nb);
            }
        }
    }
}

TEST_CASE("round-trip: 1000 random valid steps keep observations spec-valid") {
    for (const auto& id : all_env_ids()) {
        CAPTURE(id);
        const auto wrapped = auto_reset_wrap(default_registry().make(id));
        const Spec ospec = wrapped->observation_spec();
        auto [state, ts] = wrapped->reset(rng::key_from_seed(100));
        for (int t = 0; t < 1000; ++t) {
            const Action action = sample_valid_action(
                *wrapped, *state, rng::fold_in(rng::key_from_seed(101), static_cast<std::uint64_t>(t)));
            auto [next, ts2] = wrapped->step(*state, action);
            state = std::move(next);
            // Discount / step-type coupling on every emitted record.
            if (ts2.step_type == StepType::Last) {
                CHECK((ts2.discount == 0.0 || ts2.discount == 1.0));
            } else {
                CHECK(ts2.discount == 1.0);
            }
            const auto failure = ospec.validate(ts2.observation);
            if (failure.has_value()) {
                FAIL("observation failed spec at step ", t, ": ", failure->to_string());
            }
        }
    }
}

TEST_CASE("config files parse and reject malformed lines") {
    const Params p = io::parse_config("# comment\nseed = 7\nenv_id=Maze-v0\n\nrate=0.5 # tail\n");
    CHECK(p.get_int("seed", 0) == 7);
    CHECK(p.get_string("env_id", "") == "Maze-v0");
    CHECK(p.get_double("rate", 0) == 0.5);
    CHECK_THROWS_AS(io::parse_config("novalue\n"), ParseError);
}

TEST_CASE("checkpoints round-trip dense-net parameters exactly") {
    const auto params = nn::make_mlp(7, {8, 8}, 5, false, rng::key_from_seed(1));
    const auto bytes = io::encode_checkpoint(io::checkpoint_from_mlp(params));
    const auto restored = io::mlp_from_checkpoint(io::decode_checkpoint(bytes));
    CHECK(nn::to_flat(params) == nn::to_flat(restored));
    CHECK(restored.input_dim == 7);
    CHECK(restored.num_logits == 5);
    CHECK(restored.hidden == std::vector<int>{8, 8});

    const auto shared = nn::make_mlp(7, {8, 8}, 5, true, rng::key_from_seed(2));
    const auto restored2 =
        io::mlp_from_checkpoint(io::decode_checkpoint(io::encode_checkpoint(io::checkpoint_from_mlp(shared))));
    CHECK(nn::to_flat(shared) == nn::to_flat(restored2));
    CHECK(restored2.shared_torso);

    std::string corrupt = bytes;
    corrupt[0] = 'X';
    CHECK_THROWS_AS(io::decode_checkpoint(corrupt), ParseError);
    CHECK_THROWS_AS(io::decode_checkpoint(bytes.substr(0, bytes.size() - 3)), ParseError);
}

TEST_CASE("atomic_write replaces the target file completely") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "envkit_atomic_test.txt";
    io::atomic_write(path.string(), "first");
    io::atomic_write(path.string(), "second");
    CHECK(io::read_file(path.string()) == "second");
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    fs::remove(path);
}
