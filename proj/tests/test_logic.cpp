#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <set>

#include "envkit/envs/game2048.hpp"
#include "envkit/envs/rubiks_cube.hpp"
#include "envkit/envs/sliding_tile.hpp"
#include "envkit/errors.hpp"
#include "envkit/registry.hpp"
#include "oracles.hpp"

using namespace envkit;
using namespace envkit::envs;

// ---------------------------------------------------------------- Game2048

TEST_CASE("2048 line rule matches the reference on all 4^4 cases over {0,2,4,8}") {
    const std::int32_t vals[4] = {0, 2, 4, 8};
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            for (int c = 0; c < 4; ++c) {
                for (int d = 0; d < 4; ++d) {
                    std::array<std::int32_t, 4> line = {vals[a], vals[b], vals[c], vals[d]};
                    auto [expected, expected_reward] = oracles::ref_2048_line(line);
                    auto got = line;
                    const auto reward = shift_and_merge_line(got);
                    CAPTURE(line[0]);
                    CAPTURE(line[1]);
                    CAPTURE(line[2]);
                    CAPTURE(line[3]);
                    CHECK(got == expected);
                    CHECK(reward == expected_reward);
                }
            }
        }
    }
}

TEST_CASE("2048 named line cases") {
    std::array<std::int32_t, 4> line = {2, 2, 0, 0};
    CHECK(shift_and_merge_line(line) == 4);
    CHECK(line == std::array<std::int32_t, 4>{4, 0, 0, 0});

    line = {2, 2, 2, 2};
    CHECK(shift_and_merge_line(line) == 8);
    CHECK(line == std::array<std::int32_t, 4>{4, 4, 0, 0});

    line = {0, 0, 0, 0};
    CHECK(shift_and_merge_line(line) == 0);
    CHECK(line == std::array<std::int32_t, 4>{0, 0, 0, 0});
}

TEST_CASE("2048 reset: exactly one tile valued 2 or 4") {
    const Game2048 env;
    int twos = 0, fours = 0;
    for (int t = 0; t < 200; ++t) {
        Game2048State s;
        env.reset_into(rng::fold_in(rng::key_from_seed(5), static_cast<std::uint64_t>(t)), s);
        int nonzero = 0;
        for (std::int32_t v : s.board) {
            if (v != 0) {
                ++nonzero;
                CHECK((v == 2 || v == 4));
                (v == 2 ? twos : fours) += 1;
            }
        }
        CHECK(nonzero == 1);
    }
    CHECK(twos > fours); // 90/10 split
}

TEST_CASE("2048 mask is exactly the set of board-changing moves") {
    const Game2048 env;
    Game2048State s;
    env.reset_into(rng::key_from_seed(6), s);
    // A single tile in some row: shifting toward its own edge is invalid.
    s.board.fill(0);
    s.board[4] = 2; // row 1, col 0
    const auto mask = env.action_mask(s);
    CHECK(mask[3] == 0); // left: already at the left edge
    CHECK(mask[1] == 1);
    CHECK(mask[0] == 1);
    CHECK(mask[2] == 1);
    StepRecord rec;
    auto copy = s;
    CHECK_THROWS_AS(env.step_inplace(copy, Action{3}, rec), InvalidActionError);
}

TEST_CASE("2048 tile sum grows by exactly the spawned value each step") {
    const auto env = default_registry().make("Game2048-v1");
    auto [state, ts] = env->reset(rng::key_from_seed(7));
    for (int t = 0; t < 150 && !env->is_terminal(*state); ++t) {
        const auto before = unbox<Game2048State>(*state);
        std::int64_t sum_before = 0;
        for (std::int32_t v : before.board) {
            sum_before += v;
        }
        const Action a = sample_valid_action(*env, *state, rng::fold_in(rng::key_from_seed(8), static_cast<std::uint64_t>(t)));
        auto [next, ts2] = env->step(*state, a);
        const auto after = unbox<Game2048State>(*next);
        std::int64_t sum_after = 0;
        for (std::int32_t v : after.board) {
            sum_after += v;
        }
        const std::int64_t spawn = sum_after - sum_before;
        CHECK((spawn == 2 || spawn == 4));
        state = std::move(next);
    }
}

TEST_CASE("2048 terminates exactly when no move changes the board") {
    const Game2048 env;
    Game2048State s;
    env.reset_into(rng::key_from_seed(9), s);
    // Checkerboard with no equal neighbors, one move possible via the gap.
    const std::int32_t full[16] = {2, 4, 2, 4, 4, 2, 4, 2, 2, 4, 2, 4, 4, 2, 4, 8};
    std::copy(full, full + 16, s.board.begin());
    CHECK(env.action_mask(s) == std::vector<char>{0, 0, 0, 0});
}

// -------------------------------------------------------------- RubiksCube

TEST_CASE("every n=3 move composed with its inverse is the identity") {
    const RubiksCube env(Params{{"cube_size", "3"}, {"num_scrambles", "0"}});
    CubeState solved;
    env.reset_into(rng::key_from_seed(1), solved);
    for (int face = 0; face < 6; ++face) {
        for (int dir = 0; dir < 3; ++dir) {
            const int inverse_dir = dir == 2 ? 2 : 1 - dir;
            const auto turned = cube_move(solved.stickers, 3, face, 0, dir);
            const auto back = cube_move(turned, 3, face, 0, inverse_dir);
            CAPTURE(face);
            CAPTURE(dir);
            CHECK(back == solved.stickers);
            if (dir != 2) {
                CHECK_FALSE(turned == solved.stickers);
            }
        }
    }
}

TEST_CASE("a quarter turn has order four and a half turn order two") {
    const RubiksCube env(Params{{"cube_size", "3"}, {"num_scrambles", "0"}});
    CubeState solved;
    env.reset_into(rng::key_from_seed(2), solved);
    auto s = solved.stickers;
    for (int k = 0; k < 4; ++k) {
        s = cube_move(s, 3, 2, 0, 0);
    }
    CHECK(s == solved.stickers);
    s = cube_move(cube_move(solved.stickers, 3, 4, 0, 2), 3, 4, 0, 2);
    CHECK(s == solved.stickers);
}

TEST_CASE("color counts are conserved over random move products") {
    const RubiksCube env(Params{{"cube_size", "3"}, {"num_scrambles", "0"}});
    CubeState s;
    env.reset_into(rng::key_from_seed(3), s);
    const rng::Key k = rng::key_from_seed(33);
    for (int t = 0; t < 500; ++t) {
        const rng::Key mk = rng::fold_in(k, static_cast<std::uint64_t>(t));
        s.stickers = cube_move(s.stickers, 3, static_cast<int>(rng::randint_at(mk, 0, 0, 6)), 0,
                               static_cast<int>(rng::randint_at(mk, 1, 0, 3)));
        if (t % 100 == 0) {
            std::array<int, 6> counts{};
            for (std::int8_t c : s.stickers) {
                counts[static_cast<std::size_t>(c)] += 1;
            }
            for (int c : counts) {
                CHECK(c == 9);
            }
        }
    }
}

TEST_CASE("n=3 action space has 6 x 1 x 3 = 18 moves") {
    const RubiksCube env(Params{{"cube_size", "3"}});
    CHECK(env.num_moves() == 18);
    const Spec spec = env.action_spec();
    CHECK(spec.num_values_vector() == std::vector<std::int64_t>{6, 1, 3});
    // 4x4 cubes expose two depths.
    const RubiksCube big(Params{{"cube_size", "4"}, {"num_scrambles", "0"}});
    CHECK(big.num_moves() == 36);
}

TEST_CASE("inverted scrambles solve the cube with reward 1") {
    for (int scrambles = 1; scrambles <= 3; ++scrambles) {
        for (int trial = 0; trial < 20; ++trial) {
            const Params params{{"cube_size", "3"},
                                {"num_scrambles", std::to_string(scrambles)},
                                {"step_limit", "20"}};
            const auto env = envs::make_rubiks_cube("RubiksCube-test-v0", params);
            const rng::Key key =
                rng::fold_in(rng::key_from_seed(40 + scrambles), static_cast<std::uint64_t>(trial));
            auto [state, ts] = env->reset(key);

            // Recover the scramble moves the generator drew (same stream).
            const auto keys = rng::split(key, 2);
            std::vector<Action> moves;
            for (int m = 0; m < scrambles; ++m) {
                const rng::Key mk = rng::fold_in(keys[1], static_cast<std::uint64_t>(m));
                moves.push_back({rng::randint_at(mk, 0, 0, 6), rng::randint_at(mk, 1, 0, 1),
                                 rng::randint_at(mk, 2, 0, 3)});
            }
            double last_reward = 0.0;
            bool ended = false;
            for (auto it = moves.rbegin(); it != moves.rend() && !ended; ++it) {
                Action inverse = *it;
                inverse[2] = inverse[2] == 2 ? 2 : 1 - inverse[2];
                auto [next, ts2] = env->step(*state, inverse);
                state = std::move(next);
                last_reward = ts2.reward;
                ended = ts2.last();
            }
            CHECK(ended);
            CHECK(last_reward == 1.0);
        }
    }
}

TEST_CASE("zero-scramble reset is already solved; first step terminates") {
    const auto env = envs::make_rubiks_cube(
        "RubiksCube-test-v0", Params{{"cube_size", "3"}, {"num_scrambles", "0"}, {"step_limit", "20"}});
    auto [state, ts] = env->reset(rng::key_from_seed(4));
    const auto s = unbox<CubeState>(*state);
    CHECK(cube_solved(s.stickers, 3));
    // Any quarter turn then its inverse terminates with reward 1.
    auto [s2, t2] = env->step(*state, Action{0, 0, 0});
    CHECK(t2.reward == 0.0);
    auto [s3, t3] = env->step(*s2, Action{0, 0, 1});
    CHECK(t3.reward == 1.0);
    CHECK(t3.last());
    CHECK(t3.discount == 0.0);
}

TEST_CASE("partly-scrambled registry entry pins the paper configuration") {
    const auto& desc = default_registry().descriptor("RubiksCube-partly-scrambled-v0");
    CHECK(desc.default_params.get_int("cube_size", 0) == 3);
    CHECK(desc.default_params.get_int("num_scrambles", 0) == 3);
    CHECK(desc.default_params.get_int("step_limit", 0) == 20);
}

TEST_CASE("cube environment step matches the standalone move function") {
    const auto env = default_registry().make("RubiksCube-v0");
    auto [state, ts] = env->reset(rng::key_from_seed(5));
    const auto before = unbox<CubeState>(*state);
    auto [next, ts2] = env->step(*state, Action{2, 0, 1});
    CHECK(unbox<CubeState>(*next).stickers == cube_move(before.stickers, 3, 2, 0, 1));
}

TEST_CASE("cube truncates at the step limit with discount 1") {
    const auto env = envs::make_rubiks_cube(
        "RubiksCube-test-v0", Params{{"cube_size", "3"}, {"num_scrambles", "50"}, {"step_limit", "3"}});
    auto [state, ts] = env->reset(rng::key_from_seed(6));
    TimeStep last;
    for (int t = 0; t < 3; ++t) {
        auto [next, ts2] = env->step(*state, Action{0, 0, 0});
        state = std::move(next);
        last = ts2;
    }
    CHECK(last.last());
    CHECK(last.discount == 1.0);
    CHECK(last.reward == 0.0);
}

// -------------------------------------------------------- SlidingTilePuzzle

TEST_CASE("sliding tile: zero shuffles give the solved puzzle") {
    const SlidingTile env(Params{{"grid_size", "5"}, {"shuffle_moves", "0"}});
    PuzzleState s;
    env.reset_into(rng::key_from_seed(1), s);
    CHECK(env.solved(s));
    CHECK(env.prop_correct(s) == 1.0);
}

TEST_CASE("sliding tile: generated 3x3 instances are all BFS-solvable") {
    const auto reachable = oracles::sliding_tile_reachable_3x3();
    CHECK(reachable.size() == 181440);
    const SlidingTile env(Params{{"grid_size", "3"}, {"shuffle_moves", "60"}});
    for (int t = 0; t < 300; ++t) {
        PuzzleState s;
        env.reset_into(rng::fold_in(rng::key_from_seed(2), static_cast<std::uint64_t>(t)), s);
        CHECK(reachable.count(oracles::encode_tiles_3x3(s.tiles)) == 1);
    }
}

TEST_CASE("sliding tile: same key gives the same instance") {
    const SlidingTile env(Params{{"grid_size", "5"}});
    PuzzleState a, b;
    env.reset_into(rng::key_from_seed(3), a);
    env.reset_into(rng::key_from_seed(3), b);
    CHECK(a == b);
}

TEST_CASE("sliding tile rewards: out -1, back +1 solved, wrong-to-wrong 0") {
    const SlidingTile env(Params{{"grid_size", "3"}, {"shuffle_moves", "0"}, {"step_limit", "100"}});
    PuzzleState s;
    env.reset_into(rng::key_from_seed(4), s);
    StepRecord rec;

    // From solved (blank top-left): tile 1 moves left into the blank.
    env.step_inplace(s, Action{3}, rec);
    CHECK(rec.reward == -1.0);

    // Move it straight back: solved again, +1.
    auto back = s;
    env.step_inplace(back, Action{1}, rec);
    CHECK(rec.reward == 1.0);
    CHECK(rec.type == StepType::Last);
    CHECK(env.prop_correct(back) == 1.0);

    // Instead walk the blank around: tile 4 up (-1), tile 3 right (-1),
    // then tile 1 down: wrong slot to wrong slot, reward 0.
    env.step_inplace(s, Action{0}, rec);
    CHECK(rec.reward == -1.0);
    env.step_inplace(s, Action{1}, rec);
    CHECK(rec.reward == -1.0);
    env.step_inplace(s, Action{2}, rec);
    CHECK(rec.reward == 0.0);
}

TEST_CASE("sliding tile reward telescopes to correct-now minus correct-at-reset") {
    const auto env = default_registry().make("SlidingTilePuzzle-v0");
    auto [state, ts] = env->reset(rng::key_from_seed(5));
    const SlidingTile typed(Params{{"grid_size", "5"}});
    // The reward tracks real tiles only; the blank moves every step unpaid.
    const auto count_correct = [](const PuzzleState& s) {
        int n = 0;
        for (std::size_t k = 0; k < s.tiles.size(); ++k) {
            n += s.tiles[k] != 0 && s.tiles[k] == static_cast<std::int32_t>(k);
        }
        return n;
    };
    const int correct_at_reset = count_correct(unbox<PuzzleState>(*state));
    double total_reward = 0.0;
    for (int t = 0; t < 200 && !env->is_terminal(*state); ++t) {
        const Action a = sample_valid_action(*env, *state, rng::fold_in(rng::key_from_seed(6), static_cast<std::uint64_t>(t)));
        auto [next, ts2] = env->step(*state, a);
        total_reward += ts2.reward;
        state = std::move(next);
    }
    CHECK(total_reward ==
          static_cast<double>(count_correct(unbox<PuzzleState>(*state)) - correct_at_reset));
}

TEST_CASE("sliding tile mask soundness: valid steps succeed, invalid error") {
    const SlidingTile env(Params{{"grid_size", "3"}, {"shuffle_moves", "25"}});
    PuzzleState s;
    env.reset_into(rng::key_from_seed(7), s);
    const auto mask = env.action_mask(s);
    for (int d = 0; d < 4; ++d) {
        auto copy = s;
        StepRecord rec;
        if (mask[static_cast<std::size_t>(d)]) {
            CHECK_NOTHROW(env.step_inplace(copy, Action{d}, rec));
        } else {
            CHECK_THROWS_AS(env.step_inplace(copy, Action{d}, rec), InvalidActionError);
        }
    }
}
